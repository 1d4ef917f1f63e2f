//! Asymptotic operators `A = −J₀ d/dt − S(t)` on loops, their Fourier–Galerkin
//! truncations, kernels and spectral flow.
//!
//! Basis on `[0, τ]`: `1, √2 cos(2πkt/τ), √2 sin(2πkt/τ)` for `k = 1..K`,
//! tensored with the standard basis of `R^{2n}`, orthonormal for the mean
//! inner product. `−J₀ d/dt` is exactly block diagonal in this basis; the
//! `S` part is assembled by periodic trapezoidal quadrature.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::{asymmetry, j0, max_abs, n0, symmetric_eigenvalues, Mat};
use crate::{Config, Error, HalfInt, Real, Result};

type LoopFn<T> = Arc<dyn Fn(T) -> Mat<T> + Send + Sync>;
type FamilyFn<T> = Arc<dyn Fn(T, T) -> Mat<T> + Send + Sync>;

/// A `τ`-periodic loop of symmetric matrices.
#[derive(Clone)]
pub struct SymmetricLoop<T: Real> {
    n: usize,
    s: LoopFn<T>,
    period: T,
    brake_symmetric: bool,
}

impl<T: Real> std::fmt::Debug for SymmetricLoop<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SymmetricLoop")
            .field("n", &self.n)
            .field("period", &self.period)
            .field("brake_symmetric", &self.brake_symmetric)
            .finish()
    }
}

/// Number of points at which loop hypotheses are checked.
const CHECK_POINTS: usize = 64;

impl<T: Real> SymmetricLoop<T> {
    /// Checks symmetry (and `N₀S(−t)N₀ = S(t)` when `brake_symmetric`) on a
    /// uniform grid, to `tol`.
    pub fn new(
        n: usize,
        period: T,
        brake_symmetric: bool,
        tol: T,
        s: impl Fn(T) -> Mat<T> + Send + Sync + 'static,
    ) -> Result<Self> {
        if n == 0 || !(period > T::zero()) {
            return Err(Error::InvalidInput("loop needs n >= 1 and a positive period".into()));
        }
        let l = SymmetricLoop { n, s: Arc::new(s), period, brake_symmetric };
        let nn = n0::<T>(n);
        for q in 0..CHECK_POINTS {
            let t = period * T::from_usize_lossy(q) / T::from_usize_lossy(CHECK_POINTS);
            let m = l.eval(t);
            if m.shape() != (2 * n, 2 * n) {
                return Err(Error::InvalidInput(format!("S(t) must be {0}x{0}", 2 * n)));
            }
            let asym = asymmetry(&m);
            if asym > tol * (T::one() + max_abs(&m)) {
                return Err(Error::InvalidInput(format!(
                    "S(t) is not symmetric at t = {} (asymmetry {:.3e})",
                    t.to_f64_lossy(),
                    asym.to_f64_lossy()
                )));
            }
            if brake_symmetric {
                let r = max_abs(&(&nn * l.eval(period - t) * &nn - &m));
                if r > tol * (T::one() + max_abs(&m)) {
                    return Err(Error::SymmetryViolated { residual: r.to_f64_lossy(), tol: tol.to_f64_lossy() });
                }
            }
        }
        Ok(l)
    }

    /// `S(t) = c·I`.
    pub fn constant_multiple(n: usize, c: T, period: T) -> Self {
        SymmetricLoop { n, s: Arc::new(move |_| Mat::identity(2 * n, 2 * n) * c), period, brake_symmetric: true }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> T {
        self.period
    }

    pub fn is_brake_symmetric(&self) -> bool {
        self.brake_symmetric
    }

    pub fn eval(&self, t: T) -> Mat<T> {
        (self.s)(t)
    }
}

/// Function space the operator acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Domain {
    /// All `τ`-periodic loops.
    Full,
    /// Loops with `w(−t) = N₀w(t)`.
    BrakeSymmetric,
}

#[derive(Clone, Debug)]
pub struct AsymptoticOperator<T: Real> {
    pub loop_: SymmetricLoop<T>,
    pub domain: Domain,
}

impl<T: Real> AsymptoticOperator<T> {
    pub fn new(loop_: SymmetricLoop<T>, domain: Domain) -> Result<Self> {
        if domain == Domain::BrakeSymmetric && !loop_.is_brake_symmetric() {
            return Err(Error::InvalidInput("brake-symmetric domain needs a brake-symmetric loop".into()));
        }
        Ok(AsymptoticOperator { loop_, domain })
    }

    /// Truncated operator matrix with `K` Fourier modes.
    pub fn matrix(&self, k: usize) -> Mat<T> {
        let full = full_matrix(&self.loop_, k);
        match self.domain {
            Domain::Full => full,
            Domain::BrakeSymmetric => {
                let keep = brake_indices(self.loop_.n, k);
                Mat::from_fn(keep.len(), keep.len(), |r, c| full[(keep[r], keep[c])])
            }
        }
    }
}

/// Index of basis function `b` (0 = constant, `2k−1` = cos k, `2k` = sin k)
/// and component `i`.
fn idx(b: usize, i: usize, dim: usize) -> usize {
    b * dim + i
}

/// Basis vectors spanning the `w(−t) = N₀w(t)` subspace: cosines times the
/// `y`-axes and sines times the `x`-axes.
fn brake_indices(n: usize, k: usize) -> Vec<usize> {
    let dim = 2 * n;
    let mut keep = Vec::new();
    for b in 0..=2 * k {
        let cosine = b == 0 || b % 2 == 1;
        let range = if cosine { n..2 * n } else { 0..n };
        for i in range {
            keep.push(idx(b, i, dim));
        }
    }
    keep
}

fn full_matrix<T: Real>(l: &SymmetricLoop<T>, k: usize) -> Mat<T> {
    let dim = 2 * l.n;
    let nb = 2 * k + 1;
    let size = nb * dim;
    let tau = l.period;
    let two_pi = T::two_pi();
    let j = j0::<T>(l.n);
    let mut m = Mat::zeros(size, size);
    for kk in 1..=k {
        let w = two_pi * T::from_usize_lossy(kk) / tau;
        let (c, s) = (2 * kk - 1, 2 * kk);
        for a in 0..dim {
            for bb in 0..dim {
                let v = j[(a, bb)] * w;
                if v != T::zero() {
                    m[(idx(s, a, dim), idx(c, bb, dim))] += v;
                    m[(idx(c, a, dim), idx(s, bb, dim))] -= v;
                }
            }
        }
    }
    // basis values at quadrature nodes, scaled by the quadrature weight
    let q = (8 * k + 8).max(64);
    let root2 = T::lit(2.0).sqrt();
    let nodes: Vec<T> = (0..q).map(|p| tau * T::from_usize_lossy(p) / T::from_usize_lossy(q)).collect();
    let basis = Mat::from_fn(q, nb, |p, b| {
        if b == 0 {
            return T::one();
        }
        let kk = b.div_ceil(2);
        let arg = two_pi * T::from_usize_lossy(kk) * nodes[p] / tau;
        if b % 2 == 1 {
            root2 * arg.cos()
        } else {
            root2 * arg.sin()
        }
    });
    let samples: Vec<Mat<T>> = nodes.iter().map(|t| l.eval(*t)).collect();
    let weight = T::one() / T::from_usize_lossy(q);
    for a in 0..dim {
        for bb in a..dim {
            let diag: Vec<T> = samples.iter().map(|s| (s[(a, bb)] + s[(bb, a)]) * T::lit(0.5) * weight).collect();
            if diag.iter().all(|x| *x == T::zero()) {
                continue;
            }
            let weighted = Mat::from_fn(q, nb, |p, b| basis[(p, b)] * diag[p]);
            let block = basis.transpose() * weighted;
            for r in 0..nb {
                for c in 0..nb {
                    m[(idx(r, a, dim), idx(c, bb, dim))] -= block[(r, c)];
                    if a != bb {
                        m[(idx(r, bb, dim), idx(c, a, dim))] -= block[(r, c)];
                    }
                }
            }
        }
    }
    (&m + m.transpose()) * T::lit(0.5)
}

/// Sorted spectrum of the truncated operator.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum<T: Real> {
    pub k: usize,
    pub eigenvalues: Vec<T>,
}

/// Assembles the operator with `K` modes and returns its sorted spectrum,
/// after checking that eigenvalues near zero move by at most `10⁻³` when the
/// truncation is doubled.
pub fn discretize<T: Real>(op: &AsymptoticOperator<T>, k: usize) -> Result<Spectrum<T>> {
    Ok(stable_spectra(op, k)?.0)
}

fn check_k(k: usize) -> Result<()> {
    if k < 4 {
        return Err(Error::InvalidInput(format!("Fourier truncation K must be at least 4, got {k}")));
    }
    Ok(())
}

fn spectrum<T: Real>(op: &AsymptoticOperator<T>, k: usize) -> Spectrum<T> {
    Spectrum { k, eigenvalues: symmetric_eigenvalues(&op.matrix(k)) }
}

/// Spectra at `K` and `2K` after the stability check.
fn stable_spectra<T: Real>(op: &AsymptoticOperator<T>, k: usize) -> Result<(Spectrum<T>, Spectrum<T>)> {
    check_k(k)?;
    let (coarse, fine) = rayon::join(|| spectrum(op, k), || spectrum(op, 2 * k));
    // eigenvalues within half the free mode spacing of zero
    let window = T::pi() / op.loop_.period;
    let near = |v: &[T]| -> Vec<T> { v.iter().copied().filter(|x| x.abs() <= window).collect() };
    let (a, b) = (near(&coarse.eigenvalues), near(&fine.eigenvalues));
    let dist = |x: T, set: &[T]| set.iter().fold(window, |m, y| m.min((x - *y).abs()));
    let shift = a
        .iter()
        .map(|x| dist(*x, &fine.eigenvalues))
        .chain(b.iter().map(|x| dist(*x, &coarse.eigenvalues)))
        .fold(T::zero(), |m, x| m.max(x));
    if shift > T::lit(1e-3) {
        return Err(Error::TruncationUnstable { shift: shift.to_f64_lossy() });
    }
    Ok((coarse, fine))
}

/// `min(tol.zero_eig, gap/10)`, with `gap` the smallest eigenvalue modulus
/// above `tol.zero_eig`.
fn zero_threshold<T: Real>(eigenvalues: &[T], cfg: &Config) -> T {
    let base = T::lit(cfg.tol_zero_eig);
    let gap = eigenvalues.iter().map(|x| x.abs()).filter(|x| *x >= base).fold(T::max_value().unwrap_or(T::one()), |m, x| m.min(x));
    base.min(gap / T::lit(10.0))
}

/// `dim ker A` from the `2K` spectrum.
pub fn kernel_dimension<T: Real>(op: &AsymptoticOperator<T>, k: usize, cfg: &Config) -> Result<usize> {
    let (_, fine) = stable_spectra(op, k)?;
    let thr = zero_threshold(&fine.eigenvalues, cfg);
    Ok(fine.eigenvalues.iter().filter(|x| x.abs() < thr).count())
}

/// A one-parameter family `s ↦ A(s) = −J₀ d/dt − S(s, t)` on `[s₀, s₁]`.
#[derive(Clone)]
pub struct OperatorFamily<T: Real> {
    n: usize,
    period: T,
    domain: Domain,
    grid: Vec<T>,
    s: FamilyFn<T>,
}

impl<T: Real> std::fmt::Debug for OperatorFamily<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OperatorFamily")
            .field("n", &self.n)
            .field("period", &self.period)
            .field("domain", &self.domain)
            .field("grid_points", &self.grid.len())
            .finish()
    }
}

impl<T: Real> OperatorFamily<T> {
    /// Uniform grid with `points` values on `[s₀, s₁]`.
    pub fn new(
        n: usize,
        period: T,
        domain: Domain,
        s_range: (T, T),
        points: usize,
        s: impl Fn(T, T) -> Mat<T> + Send + Sync + 'static,
    ) -> Result<Self> {
        let (s0, s1) = s_range;
        if points < 2 || s0 == s1 || n == 0 || !(period > T::zero()) {
            return Err(Error::InvalidInput("family needs n >= 1, two grid points and a nonempty range".into()));
        }
        let grid = (0..points)
            .map(|i| if i + 1 == points { s1 } else { s0 + (s1 - s0) * T::from_usize_lossy(i) / T::from_usize_lossy(points - 1) })
            .collect();
        Ok(OperatorFamily { n, period, domain, grid, s: Arc::new(s) })
    }

    /// `S(s) = ((1 − β(s))a + β(s)b)·I` with a smooth monotone step `β` on `[0, 1]`.
    pub fn interpolating_multiples(n: usize, period: T, domain: Domain, a: T, b: T, points: usize) -> Result<Self> {
        Self::new(n, period, domain, (T::zero(), T::one()), points, move |s, _t| {
            let beta = smooth_step(s);
            Mat::identity(2 * n, 2 * n) * ((T::one() - beta) * a + beta * b)
        })
    }

    pub fn grid(&self) -> &[T] {
        &self.grid
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// The loop at parameter `s`.
    pub fn loop_at(&self, s: T) -> SymmetricLoop<T> {
        let f = self.s.clone();
        SymmetricLoop {
            n: self.n,
            s: Arc::new(move |t| f(s, t)),
            period: self.period,
            brake_symmetric: self.domain == Domain::BrakeSymmetric,
        }
    }

    pub fn operator_at(&self, s: T) -> AsymptoticOperator<T> {
        AsymptoticOperator { loop_: self.loop_at(s), domain: self.domain }
    }

    /// The same family traversed backwards.
    pub fn reversed(&self) -> Self {
        let mut r = self.clone();
        r.grid.reverse();
        r
    }

    /// `self` on its range followed by `other` on its range.
    pub fn concatenated(&self, other: &Self) -> Result<Self> {
        if self.n != other.n || self.domain != other.domain || (self.period - other.period).abs() > T::default_epsilon() {
            return Err(Error::InvalidInput("families must share n, period and domain".into()));
        }
        let (a, b) = (self.s.clone(), other.s.clone());
        let len_a = self.grid.len();
        // parameter u ∈ [0, 2]: first family on [0, 1], second on [1, 2]
        let (a0, a1) = (self.grid[0], self.grid[len_a - 1]);
        let (b0, b1) = (other.grid[0], other.grid[other.grid.len() - 1]);
        let mut grid: Vec<T> = self.grid.iter().map(|s| (*s - a0) / (a1 - a0)).collect();
        grid.extend(other.grid.iter().skip(1).map(|s| T::one() + (*s - b0) / (b1 - b0)));
        Ok(OperatorFamily {
            n: self.n,
            period: self.period,
            domain: self.domain,
            grid,
            s: Arc::new(move |u, t| {
                if u <= T::one() {
                    a(a0 + (a1 - a0) * u, t)
                } else {
                    b(b0 + (b1 - b0) * (u - T::one()), t)
                }
            }),
        })
    }
}

/// `C^∞` step: 0 for `s ≤ 0`, 1 for `s ≥ 1`, strictly increasing between.
pub fn smooth_step<T: Real>(s: T) -> T {
    let f = |x: T| if x > T::zero() { (-T::one() / x).exp() } else { T::zero() };
    let (a, b) = (f(s), f(T::one() - s));
    if a + b == T::zero() {
        return T::zero();
    }
    a / (a + b)
}

/// One resolved crossing bracket.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralCrossing {
    /// Bracket `[s_lo, s_hi]` in which the eigenvalues cross zero.
    pub s_lo: f64,
    pub s_hi: f64,
    /// Eigenvalues moving from positive to negative minus those moving back.
    pub net: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralFlowReport {
    pub value: i64,
    pub crossings: Vec<SpectralCrossing>,
    pub grid_points: usize,
}

fn negative_count<T: Real>(ev: &[T]) -> i64 {
    ev.iter().filter(|x| **x < T::zero()).count() as i64
}

/// Spectral flow: the net number of eigenvalues passing from positive to
/// negative as `s` runs over the grid, i.e. the change in the number of
/// negative eigenvalues.
///
/// Each grid bracket where that number changes is bisected until its width
/// is below `10⁻⁶` of the range. A bracket whose ends both keep an
/// eigenvalue inside the zero threshold is bisected further, and reported
/// unresolved at width `10⁻¹⁰`.
pub fn spectral_flow<T: Real>(family: &OperatorFamily<T>, k: usize, cfg: &Config) -> Result<SpectralFlowReport> {
    check_k(k)?;
    let grid = family.grid();
    let last = grid.len() - 1;
    for s in [grid[0], grid[last]] {
        let kernel = kernel_dimension(&family.operator_at(s), k, cfg)?;
        if kernel > 0 {
            return Err(Error::EndpointDegenerate { s: s.to_f64_lossy(), kernel });
        }
    }
    let spectra: Vec<Vec<T>> = grid.par_iter().map(|s| spectrum(&family.operator_at(*s), k).eigenvalues).collect();
    let locate = (grid[last] - grid[0]).abs() * T::lit(1e-6);
    let zero = T::lit(cfg.tol_zero_eig);
    let brackets: Vec<Result<Option<SpectralCrossing>>> = (0..last)
        .into_par_iter()
        .map(|i| {
            let refine = Refine { family, k, locate, floor: T::lit(1e-10), zero };
            refine.run((grid[i], grid[i + 1]), (spectra[i].clone(), spectra[i + 1].clone()))
        })
        .collect();
    let mut crossings = Vec::new();
    for b in brackets {
        if let Some(c) = b? {
            crossings.push(c);
        }
    }
    let value = negative_count(&spectra[last]) - negative_count(&spectra[0]);
    Ok(SpectralFlowReport { value, crossings, grid_points: grid.len() })
}

struct Refine<'a, T: Real> {
    family: &'a OperatorFamily<T>,
    k: usize,
    locate: T,
    floor: T,
    zero: T,
}

impl<T: Real> Refine<'_, T> {
    fn near_zero(&self, ev: &[T]) -> bool {
        ev.iter().any(|x| x.abs() < self.zero)
    }

    fn run(&self, (mut s0, mut s1): (T, T), (mut e0, mut e1): (Vec<T>, Vec<T>)) -> Result<Option<SpectralCrossing>> {
        let net = negative_count(&e1) - negative_count(&e0);
        if net == 0 {
            return Ok(None);
        }
        loop {
            let width = (s1 - s0).abs();
            let stuck = self.near_zero(&e0) && self.near_zero(&e1);
            if width <= self.floor && stuck {
                return Err(Error::CrossingUnresolved { s: s0.to_f64_lossy() });
            }
            if width <= self.locate && !stuck || width <= self.floor {
                return Ok(Some(SpectralCrossing { s_lo: s0.to_f64_lossy(), s_hi: s1.to_f64_lossy(), net }));
            }
            // split off-centre when the midpoint operator is itself degenerate
            let mut split = None;
            for frac in [0.5, 0.381_966, 0.618_034] {
                let mid = s0 + (s1 - s0) * T::lit(frac);
                let em = spectrum(&self.family.operator_at(mid), self.k).eigenvalues;
                if !self.near_zero(&em) || frac > 0.6 {
                    split = Some((mid, em));
                    break;
                }
            }
            let (mid, em) = split.expect("at least one split is tried");
            let left = negative_count(&em) - negative_count(&e0);
            if left == net {
                s1 = mid;
                e1 = em;
            } else if left == 0 {
                s0 = mid;
                e0 = em;
            } else {
                // crossings on both sides of the split: report the bracket as one net event
                return Ok(Some(SpectralCrossing { s_lo: s0.to_f64_lossy(), s_hi: s1.to_f64_lossy(), net }));
            }
        }
    }
}

/// Fredholm index of the cylinder operator, which equals the spectral flow
/// of its asymptotic family.
pub fn cylinder_index<T: Real>(family: &OperatorFamily<T>, k: usize, cfg: &Config) -> Result<HalfInt> {
    Ok(HalfInt::from_int(spectral_flow(family, k, cfg)?.value))
}
