use nalgebra::{Complex, DMatrix};

use crate::linalg::{j0, max_abs, n0, Mat};
use crate::symplectic::SymplecticPath;
use crate::{Error, Real, Result};

/// A loop in `U(n) ⊂ Sp(2n)` over one period `[0, τ]`, sampled.
///
/// `A + iB ∈ U(n)` is embedded as `[[A, −B], [B, A]]`.
#[derive(Clone, Debug)]
pub struct UnitaryLoop<T: Real> {
    path: SymplecticPath<T>,
    period: T,
}

impl<T: Real> UnitaryLoop<T> {
    /// Validates that every sample is orthogonal-symplectic, that the samples
    /// start at 0 and end at the period, and that the loop closes.
    pub fn new(times: Vec<T>, values: Vec<Mat<T>>, tol: T) -> Result<Self> {
        for v in &values {
            let dim = v.nrows();
            let orth = max_abs(&(v.transpose() * v - Mat::identity(dim, dim)));
            if orth > tol {
                return Err(Error::InvalidInput(format!("loop sample is not orthogonal (residual {:.3e})", orth.to_f64_lossy())));
            }
        }
        let path = SymplecticPath::from_samples(times, values, tol)?;
        Self::from_path(path, tol)
    }

    pub fn from_fn(period: T, samples: usize, f: impl Fn(T) -> Mat<T>, tol: T) -> Result<Self> {
        if samples < 3 {
            return Err(Error::InvalidInput("a loop needs at least 3 samples".into()));
        }
        let times = (0..samples)
            .map(|k| if k + 1 == samples { period } else { period * T::from_usize_lossy(k) / T::from_usize_lossy(samples - 1) })
            .collect::<Vec<_>>();
        let values = times.iter().map(|t| f(*t)).collect();
        Self::new(times, values, tol)
    }

    fn from_path(path: SymplecticPath<T>, tol: T) -> Result<Self> {
        if path.start() != T::zero() {
            return Err(Error::InvalidInput("loop samples must start at t = 0".into()));
        }
        let closure = max_abs(&(path.first() - path.last()));
        if closure > tol.max(T::lit(1e-9)) {
            return Err(Error::InvalidInput(format!("loop does not close (residual {:.3e})", closure.to_f64_lossy())));
        }
        let period = path.end();
        Ok(UnitaryLoop { path, period })
    }

    /// `t ↦ diag(e^{2πikt/τ}, 1, …, 1)`, of degree `k`.
    pub fn circle(k: i64, n: usize, period: T, samples: usize) -> Result<Self> {
        if samples < 3 || n == 0 || !(period > T::zero()) {
            return Err(Error::InvalidInput("circle loop needs n >= 1, samples >= 3, period > 0".into()));
        }
        let speed = T::two_pi() * T::lit(k as f64) / period;
        let mut gen_unit = Mat::<T>::zeros(2 * n, 2 * n);
        gen_unit[(0, n)] = -T::one();
        gen_unit[(n, 0)] = T::one();
        let at = |t: T| {
            let (s, c) = (speed * t).sin_cos();
            let mut m = Mat::identity(2 * n, 2 * n);
            m[(0, 0)] = c;
            m[(n, n)] = c;
            m[(0, n)] = -s;
            m[(n, 0)] = s;
            m
        };
        let times: Vec<T> = (0..samples)
            .map(|i| if i + 1 == samples { period } else { period * T::from_usize_lossy(i) / T::from_usize_lossy(samples - 1) })
            .collect();
        let mut values: Vec<Mat<T>> = times.iter().map(|t| at(*t)).collect();
        // the loop closes exactly
        values[samples - 1] = values[0].clone();
        let generators = times.windows(2).map(|w| &gen_unit * (speed * (w[1] - w[0]))).collect();
        Ok(UnitaryLoop { path: SymplecticPath::from_parts(times, values, generators), period })
    }

    /// The constant identity loop.
    pub fn constant(n: usize, period: T, samples: usize) -> Result<Self> {
        Self::circle(0, n, period, samples)
    }

    pub fn n(&self) -> usize {
        self.path.n()
    }

    pub fn period(&self) -> T {
        self.period
    }

    pub fn times(&self) -> &[T] {
        self.path.times()
    }

    pub fn values(&self) -> &[Mat<T>] {
        self.path.values()
    }

    /// `φ(t)` for any real `t`, using periodicity.
    pub fn eval(&self, t: T) -> Mat<T> {
        let mut s = t % self.period;
        if s < T::zero() {
            s += self.period;
        }
        self.path.eval(s)
    }

    /// Pointwise product `φ(t)ψ(t)` at this loop's sample times.
    pub fn product(&self, other: &Self, tol: T) -> Result<Self> {
        if (self.period - other.period).abs() > tol || self.n() != other.n() {
            return Err(Error::InvalidInput("loops must share period and dimension".into()));
        }
        let values = self.times().iter().zip(self.values()).map(|(t, v)| v * other.eval(*t)).collect();
        Self::new(self.times().to_vec(), values, tol)
    }

    /// `t ↦ φ(τ − t)`.
    pub fn reversed(&self) -> Self {
        let values: Vec<Mat<T>> = self.times().iter().map(|t| self.eval(self.period - *t)).collect();
        let path = SymplecticPath::from_samples(self.times().to_vec(), values, T::lit(1e-6))
            .unwrap_or_else(|_| self.path.time_reversed());
        UnitaryLoop { path, period: self.period }
    }

    /// `sup_t ‖N₀φ(−t)N₀ − φ(t)‖`, equivalently the failure of `φ(−t)N₀ = N₀φ(t)`.
    pub fn brake_residual(&self) -> T {
        let n = self.n();
        brake_residual(|t| self.eval(t), self.times(), n)
    }
}

/// `sup ‖N₀F(−t)N₀ − F(t)‖` over `times`.
///
/// Covers both `N₀S(−t)N₀ = S(t)` for loops of symmetric matrices and
/// `φ(−t)N₀ = N₀φ(t)` for unitary loops.
pub fn brake_residual<T: Real>(f: impl Fn(T) -> Mat<T>, times: &[T], n: usize) -> T {
    let nn = n0::<T>(n);
    times
        .iter()
        .map(|t| max_abs(&(&nn * f(-*t) * &nn - f(*t))))
        .fold(T::zero(), |a, b| a.max(b))
}

/// Complex determinant of the `U(n)` element embedded in `m`.
fn complex_det<T: Real>(m: &Mat<T>) -> Complex<T> {
    let n = m.nrows() / 2;
    let c = DMatrix::from_fn(n, n, |i, j| Complex::new(m[(i, j)], m[(n + i, j)]));
    c.determinant()
}

fn arg<T: Real>(z: Complex<T>) -> T {
    z.im.atan2(z.re)
}

/// Winding number of `det ∘ φ` around the origin.
pub fn loop_degree<T: Real>(phi: &UnitaryLoop<T>) -> Result<i64> {
    let pi = T::pi();
    let half_pi = pi * T::lit(0.5);
    let mut total = T::zero();
    let mut prev = arg(complex_det(&phi.values()[0]));
    for v in &phi.values()[1..] {
        let phase = arg(complex_det(v));
        let mut d = phase - prev;
        while d > pi {
            d -= T::two_pi();
        }
        while d <= -pi {
            d += T::two_pi();
        }
        if d.abs() > half_pi {
            return Err(Error::PhaseJumpTooLarge { jump: d.to_f64_lossy() });
        }
        total += d;
        prev = phase;
    }
    let winding = total / T::two_pi();
    Ok(winding.round().to_f64_lossy() as i64)
}

/// `J₀`-linearity check used by tests: `φJ₀ = J₀φ`.
#[allow(dead_code)]
pub(crate) fn commutes_with_j<T: Real>(m: &Mat<T>) -> T {
    let j = j0::<T>(m.nrows() / 2);
    max_abs(&(m * &j - &j * m))
}
