//! Small dense helpers on `DMatrix`: exponential, logarithm near the
//! identity, orthonormal frames, spectra.

use nalgebra::{DMatrix, DVector};

use crate::Real;

pub type Mat<T> = DMatrix<T>;
pub type Vector<T> = DVector<T>;

/// The standard complex structure `J₀ = [[0, −I], [I, 0]]` on `R^{2n}`.
pub fn j0<T: Real>(n: usize) -> Mat<T> {
    let mut j = Mat::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = -T::one();
        j[(n + i, i)] = T::one();
    }
    j
}

/// The involution `N₀ = diag(−I, I)`.
pub fn n0<T: Real>(n: usize) -> Mat<T> {
    let mut m = Mat::identity(2 * n, 2 * n);
    for i in 0..n {
        m[(i, i)] = -T::one();
    }
    m
}

pub fn max_abs<T: Real>(m: &Mat<T>) -> T {
    m.iter().fold(T::zero(), |acc, x| acc.max(x.abs()))
}

/// Induced 1-norm (max column sum).
pub fn norm1<T: Real>(m: &Mat<T>) -> T {
    (0..m.ncols())
        .map(|j| m.column(j).iter().fold(T::zero(), |a, x| a + x.abs()))
        .fold(T::zero(), |a, b| a.max(b))
}

/// Matrix exponential by scaling and squaring with a truncated Taylor series.
pub fn expm<T: Real>(a: &Mat<T>) -> Mat<T> {
    let dim = a.nrows();
    let norm = norm1(a);
    let mut squarings = 0u32;
    let half = T::lit(0.5);
    let mut scale = T::one();
    while norm * scale > half {
        scale *= half;
        squarings += 1;
    }
    let scaled = a * scale;
    let eps = T::default_epsilon();
    let mut result = Mat::identity(dim, dim);
    let mut term = Mat::identity(dim, dim);
    for k in 1..40 {
        term = &term * &scaled / T::from_usize_lossy(k);
        result += &term;
        if max_abs(&term) <= eps * T::lit(1e-2) {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Principal square root by the Denman–Beavers iteration.
pub fn sqrtm<T: Real>(x: &Mat<T>) -> Option<Mat<T>> {
    let dim = x.nrows();
    let mut y = x.clone();
    let mut z = Mat::identity(dim, dim);
    let half = T::lit(0.5);
    for _ in 0..100 {
        let y_inv = y.clone().try_inverse()?;
        let z_inv = z.clone().try_inverse()?;
        let y_next = (&y + z_inv) * half;
        let z_next = (&z + y_inv) * half;
        let delta = max_abs(&(&y_next - &y));
        y = y_next;
        z = z_next;
        if delta <= T::default_epsilon() * T::lit(10.0) * (T::one() + max_abs(&y)) {
            return Some(y);
        }
    }
    None
}

/// Principal logarithm by inverse scaling and squaring. `None` if the matrix
/// has eigenvalues on the closed negative real axis (or is too far from the
/// identity to take square roots reliably).
pub fn logm<T: Real>(x: &Mat<T>) -> Option<Mat<T>> {
    let dim = x.nrows();
    let id = Mat::<T>::identity(dim, dim);
    let mut y = x.clone();
    let mut roots = 0u32;
    let quarter = T::lit(0.25);
    while norm1(&(&y - &id)) > quarter {
        if roots >= 40 {
            return None;
        }
        y = sqrtm(&y)?;
        roots += 1;
    }
    let e = &y - &id;
    let eps = T::default_epsilon();
    let mut result = Mat::zeros(dim, dim);
    let mut power = id.clone();
    for k in 1..200 {
        power = &power * &e;
        let term = &power / T::from_usize_lossy(k);
        if k % 2 == 1 {
            result += &term;
        } else {
            result -= &term;
        }
        if max_abs(&term) <= eps * T::lit(1e-2) {
            break;
        }
    }
    let mut factor = T::one();
    for _ in 0..roots {
        factor *= T::lit(2.0);
    }
    Some(result * factor)
}

/// Projects a matrix onto the Lie algebra `sp(2n) = {J₀S : S symmetric}`.
pub fn project_hamiltonian<T: Real>(g: &Mat<T>) -> Mat<T> {
    let n = g.nrows() / 2;
    let j = j0::<T>(n);
    let s = -(&j * g);
    let sym = (&s + s.transpose()) * T::lit(0.5);
    j * sym
}

/// Orthonormal basis of the column span (assumed full column rank).
pub fn orthonormal_frame<T: Real>(a: &Mat<T>) -> Mat<T> {
    a.clone().qr().q()
}

/// Singular values in ascending order.
pub fn singular_values_ascending<T: Real>(a: &Mat<T>) -> Vec<T> {
    let mut sv: Vec<T> = a.singular_values().iter().copied().collect();
    sv.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn symmetric_eigenvalues<T: Real>(s: &Mat<T>) -> Vec<T> {
    let sym = (s + s.transpose()) * T::lit(0.5);
    let mut ev: Vec<T> = sym.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    ev
}

/// `‖A − Aᵀ‖∞` entrywise.
pub fn asymmetry<T: Real>(a: &Mat<T>) -> T {
    max_abs(&(a - a.transpose()))
}

/// Number of singular values of `a` below `tol`.
pub fn nullity<T: Real>(a: &Mat<T>, tol: T) -> usize {
    a.singular_values().iter().filter(|s| **s < tol).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_rotation_generator() {
        let j = j0::<f64>(1);
        let r = expm(&(j.clone() * std::f64::consts::PI));
        assert!((r[(0, 0)] + 1.0).abs() < 1e-14);
        assert!(r[(1, 0)].abs() < 1e-14);
        let half = expm(&(j * std::f64::consts::FRAC_PI_2));
        assert!((half[(1, 0)] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn log_inverts_exp() {
        let g = Mat::from_row_slice(2, 2, &[0.3, -1.2, 0.7, -0.3]);
        let x = expm(&g);
        let back = logm(&x).unwrap();
        assert!(max_abs(&(back - g)) < 1e-12);
    }

    #[test]
    fn log_fails_on_negative_identity() {
        let x = -Mat::<f64>::identity(2, 2);
        // -I has a repeated eigenvalue on the negative axis: no real principal log.
        assert!(logm(&x).is_none() || {
            let l = logm(&x).unwrap();
            max_abs(&(expm(&l) - x)) > 1e-6
        });
    }

    #[test]
    fn structures_square_correctly() {
        for n in 1..4 {
            let j = j0::<f64>(n);
            let nn = n0::<f64>(n);
            let id = Mat::identity(2 * n, 2 * n);
            assert_eq!(&j * &j, -&id);
            assert_eq!(&nn * &nn, id);
            assert_eq!(&nn * &j, -(&j * &nn));
        }
    }

    #[test]
    fn f32_exponential() {
        let j = j0::<f32>(1);
        let r = expm(&(j * std::f32::consts::PI));
        assert!((r[(0, 0)] + 1.0).abs() < 1e-5);
    }
}
