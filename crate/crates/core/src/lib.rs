//! Numerical index theory for brake-symmetric Hamiltonian systems and
//! pseudoholomorphic curves with brake symmetry.
//!
//! The numerical modules are generic over the scalar type ([`Real`], i.e.
//! `f32` or `f64`); index values are always exact [`HalfInt`]s. Concrete
//! `f64` aliases are provided at the crate root.

pub mod cap;
pub mod config;
pub mod error;
pub mod half_int;
pub mod hamiltonian;
pub mod index;
pub mod linalg;
pub mod moduli;
pub mod operator;
pub mod scalar;
pub mod selfcheck;
pub mod symplectic;

pub use config::Config;
pub use error::{Error, Result};
pub use half_int::HalfInt;
pub use scalar::Real;

pub type SymplecticPath64 = symplectic::SymplecticPath<f64>;
pub type SymplecticMatrix64 = symplectic::SymplecticMatrix<f64>;
pub type Lagrangian64 = symplectic::Lagrangian<f64>;
pub type UnitaryLoop64 = symplectic::UnitaryLoop<f64>;
pub type SymmetricLoop64 = operator::SymmetricLoop<f64>;
pub type OperatorFamily64 = operator::OperatorFamily<f64>;
