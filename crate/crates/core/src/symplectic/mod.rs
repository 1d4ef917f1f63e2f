//! Linear symplectic algebra on `R^{2n}` with coordinates `(x₁..xₙ, y₁..yₙ)`.
//!
//! The symplectic form is `ω(u, v) = Σ dxᵢ∧dyᵢ (u, v) = −uᵀJ₀v`, so that a
//! path `Φ̇ = J₀SΦ` has crossing form `⟨v, Sv⟩`.

mod path;
mod unitary;

pub use path::{fundamental_solution, rotation_path, SymplecticPath};
pub use unitary::{brake_residual, loop_degree, UnitaryLoop};

use crate::linalg::{j0, max_abs, n0, orthonormal_frame, singular_values_ascending, Mat};
use crate::{Error, Real, Result};

/// Gram matrix of the standard form on `R^{2n}`.
pub fn standard_form<T: Real>(n: usize) -> Mat<T> {
    -j0::<T>(n)
}

/// Gram matrix of `(−ω) ⊕ ω` on `R^{4n} = R^{2n} × R^{2n}`.
pub fn product_form<T: Real>(n: usize) -> Mat<T> {
    let mut m = Mat::zeros(4 * n, 4 * n);
    let j = j0::<T>(n);
    m.view_mut((0, 0), (2 * n, 2 * n)).copy_from(&j);
    m.view_mut((2 * n, 2 * n), (2 * n, 2 * n)).copy_from(&(-j));
    m
}

/// `‖MᵀJ₀M − J₀‖∞`.
pub fn symplectic_residual<T: Real>(m: &Mat<T>) -> T {
    let n = m.nrows() / 2;
    let j = j0::<T>(n);
    max_abs(&(m.transpose() * &j * m - j))
}

/// `M⁻¹ = −J₀MᵀJ₀` for symplectic `M`.
pub fn symplectic_inverse<T: Real>(m: &Mat<T>) -> Mat<T> {
    let n = m.nrows() / 2;
    let j = j0::<T>(n);
    -(&j * m.transpose() * &j)
}

/// A matrix in `Sp(2n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticMatrix<T: Real> {
    n: usize,
    m: Mat<T>,
}

impl<T: Real> SymplecticMatrix<T> {
    pub fn new(m: Mat<T>, tol: T) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() % 2 != 0 || m.nrows() == 0 {
            return Err(Error::InvalidInput(format!(
                "symplectic matrix must be 2n x 2n, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
        let drift = symplectic_residual(&m);
        if drift > tol {
            return Err(Error::SymplecticityLost { drift: drift.to_f64_lossy(), tol: tol.to_f64_lossy() });
        }
        Ok(SymplecticMatrix { n: m.nrows() / 2, m })
    }

    pub fn identity(n: usize) -> Self {
        SymplecticMatrix { n, m: Mat::identity(2 * n, 2 * n) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &Mat<T> {
        &self.m
    }

    pub fn into_matrix(self) -> Mat<T> {
        self.m
    }

    pub fn inverse(&self) -> Self {
        SymplecticMatrix { n: self.n, m: symplectic_inverse(&self.m) }
    }

    pub fn compose(&self, other: &Self) -> Self {
        SymplecticMatrix { n: self.n, m: &self.m * &other.m }
    }

    pub fn residual(&self) -> T {
        symplectic_residual(&self.m)
    }
}

/// Which symplectic form a Lagrangian is isotropic for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ambient {
    /// `ω` on `R^{2n}`.
    Standard,
    /// `(−ω) ⊕ ω` on `R^{4n}`.
    Product,
}

/// A Lagrangian subspace stored as an orthonormal frame.
#[derive(Clone, Debug, PartialEq)]
pub struct Lagrangian<T: Real> {
    n: usize,
    ambient: Ambient,
    frame: Mat<T>,
}

impl<T: Real> Lagrangian<T> {
    /// Orthonormalizes `frame` and checks rank and isotropy.
    pub fn new(frame: Mat<T>, ambient: Ambient, tol: T) -> Result<Self> {
        let (dim, k) = frame.shape();
        let n = match ambient {
            Ambient::Standard => dim / 2,
            Ambient::Product => dim / 4,
        };
        let expected_k = match ambient {
            Ambient::Standard => n,
            Ambient::Product => 2 * n,
        };
        if n == 0 || k != expected_k || dim != 2 * expected_k {
            return Err(Error::InvalidInput(format!("Lagrangian frame has shape {dim}x{k}")));
        }
        let sv = singular_values_ascending(&frame);
        if sv[0] <= tol * sv[sv.len() - 1] {
            return Err(Error::InvalidInput("Lagrangian frame is rank deficient".into()));
        }
        let frame = orthonormal_frame(&frame);
        let l = Lagrangian { n, ambient, frame };
        let iso = l.isotropy_residual();
        if iso > tol {
            return Err(Error::InvalidInput(format!("frame is not isotropic (residual {:.3e})", iso.to_f64_lossy())));
        }
        Ok(l)
    }

    /// Trusted constructor for frames that are orthonormal and isotropic by
    /// construction.
    pub(crate) fn from_orthonormal(frame: Mat<T>, ambient: Ambient) -> Self {
        let n = match ambient {
            Ambient::Standard => frame.nrows() / 2,
            Ambient::Product => frame.nrows() / 4,
        };
        Lagrangian { n, ambient, frame }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn frame(&self) -> &Mat<T> {
        &self.frame
    }

    pub fn form(&self) -> Mat<T> {
        match self.ambient {
            Ambient::Standard => standard_form(self.n),
            Ambient::Product => product_form(self.n),
        }
    }

    /// `‖FᵀΩF‖∞`.
    pub fn isotropy_residual(&self) -> T {
        max_abs(&(self.frame.transpose() * self.form() * &self.frame))
    }

    /// Image under a symplectic matrix (standard ambient only).
    pub fn transformed(&self, m: &Mat<T>) -> Self {
        Lagrangian { n: self.n, ambient: self.ambient, frame: orthonormal_frame(&(m * &self.frame)) }
    }

    /// `dim(self ∩ other)`: the number of singular values of the stacked
    /// frame `[F₁ F₂]` below `tol`.
    pub fn intersection_dim(&self, other: &Self, tol: T) -> usize {
        intersection_dim_frames(&self.frame, &other.frame, tol)
    }

    pub fn same_as(&self, other: &Self, tol: T) -> bool {
        self.intersection_dim(other, tol) == self.frame.ncols()
    }
}

pub(crate) fn stacked<T: Real>(a: &Mat<T>, b: &Mat<T>) -> Mat<T> {
    let mut s = Mat::zeros(a.nrows(), a.ncols() + b.ncols());
    s.view_mut((0, 0), a.shape()).copy_from(a);
    s.view_mut((0, a.ncols()), b.shape()).copy_from(b);
    s
}

pub(crate) fn intersection_dim_frames<T: Real>(a: &Mat<T>, b: &Mat<T>, tol: T) -> usize {
    singular_values_ascending(&stacked(a, b)).iter().take_while(|s| **s < tol).count()
}

/// The standard structures in dimension `2n`.
#[derive(Clone, Debug)]
pub struct StandardStructures<T: Real> {
    pub n: usize,
    pub j0: Mat<T>,
    pub n0: Mat<T>,
    /// `L₁ = {0} × Rⁿ`.
    pub l1: Lagrangian<T>,
    /// `L₂ = Rⁿ × {0}`.
    pub l2: Lagrangian<T>,
    /// Diagonal `W = {(x, x)} ⊂ R^{4n}`.
    pub w: Lagrangian<T>,
}

impl<T: Real> StandardStructures<T> {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "n must be positive");
        let mut l1 = Mat::zeros(2 * n, n);
        let mut l2 = Mat::zeros(2 * n, n);
        for i in 0..n {
            l1[(n + i, i)] = T::one();
            l2[(i, i)] = T::one();
        }
        StandardStructures {
            n,
            j0: j0(n),
            n0: n0(n),
            l1: Lagrangian::from_orthonormal(l1, Ambient::Standard),
            l2: Lagrangian::from_orthonormal(l2, Ambient::Standard),
            w: graph(&Mat::identity(2 * n, 2 * n)),
        }
    }

    /// `L₁` for `k = 1`, `L₂` for `k = 2`.
    pub fn l(&self, k: u8) -> &Lagrangian<T> {
        match k {
            1 => &self.l1,
            2 => &self.l2,
            _ => panic!("brake index k must be 1 or 2"),
        }
    }
}

/// `Gr(M) = {(x, Mx)} ⊂ R^{4n}`, Lagrangian for `(−ω) ⊕ ω` when `M` is symplectic.
pub fn graph<T: Real>(m: &Mat<T>) -> Lagrangian<T> {
    let dim = m.nrows();
    let mut f = Mat::zeros(2 * dim, dim);
    f.view_mut((0, 0), (dim, dim)).copy_from(&Mat::identity(dim, dim));
    f.view_mut((dim, 0), (dim, dim)).copy_from(m);
    Lagrangian::from_orthonormal(orthonormal_frame(&f), Ambient::Product)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::expm;

    #[test]
    fn structures_for_n1() {
        let s = StandardStructures::<f64>::new(1);
        assert_eq!(s.j0, Mat::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]));
        assert_eq!(s.n0, Mat::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 1.0]));
        assert_eq!(s.l1.frame().column(0).as_slice(), &[0.0, 1.0]);
        assert_eq!(s.l1.isotropy_residual(), 0.0);
    }

    #[test]
    fn structures_are_isotropic() {
        for n in 1..4 {
            let s = StandardStructures::<f64>::new(n);
            let id = Mat::identity(2 * n, 2 * n);
            assert_eq!(&s.j0 * &s.j0, -&id);
            assert_eq!(&s.n0 * &s.n0, id);
            assert!(s.l1.isotropy_residual() < 1e-15);
            assert!(s.l2.isotropy_residual() < 1e-15);
            assert!(s.w.isotropy_residual() < 1e-15);
            let m = expm(&(&s.j0 * Mat::from_fn(2 * n, 2 * n, |i, j| ((i + j) as f64 * 0.3).cos())));
            assert!(graph(&m).isotropy_residual() < 1e-12);
        }
    }

    #[test]
    fn graph_of_identity_is_diagonal() {
        let s = StandardStructures::<f64>::new(2);
        let g = graph(&Mat::identity(4, 4));
        assert!(g.same_as(&s.w, 1e-8));
    }

    #[test]
    fn intersections() {
        let s = StandardStructures::<f64>::new(2);
        assert_eq!(s.l1.intersection_dim(&s.l2, 1e-8), 0);
        assert_eq!(s.l1.intersection_dim(&s.l1, 1e-8), 2);
        let minus = -Mat::<f64>::identity(4, 4);
        assert_eq!(s.l1.transformed(&minus).intersection_dim(&s.l1, 1e-8), 2);
    }

    #[test]
    fn rejects_non_symplectic() {
        let m = Mat::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 2.0]);
        assert!(matches!(SymplecticMatrix::new(m, 1e-9), Err(Error::SymplecticityLost { .. })));
        let r = expm(&(j0::<f64>(1) * 0.7));
        let s = SymplecticMatrix::new(r, 1e-9).unwrap();
        assert!(max_abs(&(s.compose(&s.inverse()).into_matrix() - Mat::identity(2, 2))) < 1e-14);
    }

    #[test]
    fn rejects_non_isotropic_frame() {
        // columns x1 and y1 pair nontrivially under ω
        let bad = Mat::from_row_slice(4, 2, &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        assert!(Lagrangian::new(bad, Ambient::Standard, 1e-9).is_err());
        let good = Mat::from_row_slice(4, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(Lagrangian::new(good, Ambient::Standard, 1e-9).is_ok());
    }
}
