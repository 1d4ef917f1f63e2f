//! Maslov-type indices of symplectic paths.
//!
//! Conventions: `μ_CZ(Φ) = μ^{RS}(W, Gr Φ)`, which is `1` for `t ↦ R(πt)` on
//! `[0, 1]`; the brake indices are `μ_k(Φ) = μ^{RS}(L_k, ΦL_k)` on `[0, τ/2]`.

mod crossing;

pub use crossing::{graph_index, rs_index, Crossing, GraphPath, IndexReport, LagrangianPath, Transported};

use serde::{Deserialize, Serialize};

use crate::linalg::{singular_values_ascending, Mat};
use crate::symplectic::{intersection_dim_frames, loop_degree, StandardStructures, SymplecticPath, UnitaryLoop};
use crate::{Config, Error, HalfInt, Real, Result};

/// Conley–Zehnder index over the whole interval of a based path.
pub fn cz_index<T: Real>(path: &SymplecticPath<T>, cfg: &Config) -> Result<HalfInt> {
    if !path.is_based() {
        return Err(Error::InvalidInput("Conley-Zehnder index needs a path with Φ(a) = I".into()));
    }
    Ok(graph_index(path, cfg)?.value)
}

/// Brake index `μ_k`, `k ∈ {1, 2}`, of a path on `[0, τ]`.
pub fn brake_mu<T: Real>(path: &SymplecticPath<T>, k: u8, cfg: &Config) -> Result<HalfInt> {
    Ok(brake_report(path, k, cfg)?.value)
}

/// Full crossing report behind [`brake_mu`].
pub fn brake_report<T: Real>(path: &SymplecticPath<T>, k: u8, cfg: &Config) -> Result<IndexReport> {
    if k != 1 && k != 2 {
        return Err(Error::InvalidInput(format!("brake index k must be 1 or 2, got {k}")));
    }
    if !path.is_based() {
        return Err(Error::InvalidInput("brake index needs a path with Φ(0) = I".into()));
    }
    let s = StandardStructures::<T>::new(path.n());
    let a = path.start();
    let half = a + (path.end() - a) * T::lit(0.5);
    let sub = path.restricted(a, half);
    let base = s.l(k);
    rs_index(base, &Transported { path: &sub, base }, (a, half), cfg)
}

/// `ν`, `ν₁`, `ν₂` of a path on `[0, τ]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Nullities {
    pub nu: usize,
    pub nu1: usize,
    pub nu2: usize,
}

/// `ν = dim ker(Φ(τ) − I)` and `ν_k = dim(Φ(τ/2)L_k ∩ L_k)` by singular-value
/// rank tests at `cfg.tol_rank`.
pub fn nullities<T: Real>(path: &SymplecticPath<T>, cfg: &Config) -> Nullities {
    let tol = T::lit(cfg.tol_rank);
    let n = path.n();
    let s = StandardStructures::<T>::new(n);
    let end = path.last();
    let scale = crate::linalg::max_abs(end).max(T::one());
    let nu = singular_values_ascending(&(end - Mat::identity(2 * n, 2 * n)))
        .iter()
        .take_while(|x| **x < tol * scale)
        .count();
    let half = path.eval(path.start() + (path.end() - path.start()) * T::lit(0.5));
    let nu_k = |k: u8| {
        let moved = crate::linalg::orthonormal_frame(&(&half * s.l(k).frame()));
        intersection_dim_frames(&moved, s.l(k).frame(), tol)
    };
    Nullities { nu, nu1: nu_k(1), nu2: nu_k(2) }
}

fn product_path<T: Real>(phi: &UnitaryLoop<T>, path: &SymplecticPath<T>, cfg: &Config) -> Result<SymplecticPath<T>> {
    if phi.n() != path.n() {
        return Err(Error::InvalidInput("loop and path have different dimensions".into()));
    }
    let mut times: Vec<T> = path.times().to_vec();
    let (a, b) = (path.start(), path.end());
    times.extend(phi.times().iter().copied().filter(|t| *t > a && *t < b));
    times.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    times.dedup_by(|x, y| (*x - *y).abs() <= T::lit(cfg.tol_time));
    let dense = times.iter().map(|t| phi.eval(*t) * path.eval(*t)).collect();
    SymplecticPath::from_samples(times, dense, T::lit(cfg.tol_symplectic).max(T::default_epsilon() * T::lit(1e3)))
}

/// `μ_CZ(φΦ)` for a loop `φ` in `U(n)` and a based path `Φ` on one period.
pub fn loop_shift_cz<T: Real>(phi: &UnitaryLoop<T>, path: &SymplecticPath<T>, cfg: &Config) -> Result<HalfInt> {
    cz_index(&product_path(phi, path, cfg)?, cfg)
}

/// `μ₁(φΦ)` for a brake-symmetric loop `φ`.
pub fn loop_shift_mu1<T: Real>(phi: &UnitaryLoop<T>, path: &SymplecticPath<T>, cfg: &Config) -> Result<HalfInt> {
    let residual = phi.brake_residual();
    let tol = T::lit(cfg.tol_rank).max(T::default_epsilon() * T::lit(1e3));
    if residual > tol {
        return Err(Error::SymmetryViolated { residual: residual.to_f64_lossy(), tol: tol.to_f64_lossy() });
    }
    brake_mu(&product_path(phi, path, cfg)?, 1, cfg)
}

/// `deg(φ)`, re-exported for the loop-shift identities.
pub fn degree<T: Real>(phi: &UnitaryLoop<T>) -> Result<i64> {
    loop_degree(phi)
}
