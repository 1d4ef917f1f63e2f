use crate::linalg::{expm, j0, logm, max_abs, norm1, project_hamiltonian, Mat};
use crate::symplectic::{symplectic_inverse, symplectic_residual};
use crate::{Config, Error, Real, Result};

/// A sampled path in `Sp(2n)`.
///
/// Between samples the path is the one-parameter subgroup through the two
/// neighbouring samples, `Φ(tᵢ + sΔ) = Φ(tᵢ)·exp(s·Gᵢ)` with `Gᵢ ∈ sp(2n)`, so
/// every interpolated value is exactly symplectic. Evaluation slightly
/// outside `[a, b]` extrapolates the first or last segment.
#[derive(Clone, Debug)]
pub struct SymplecticPath<T: Real> {
    n: usize,
    times: Vec<T>,
    values: Vec<Mat<T>>,
    generators: Vec<Mat<T>>,
    based: bool,
}

impl<T: Real> SymplecticPath<T> {
    /// Builds a path from samples, recovering segment generators by matrix
    /// logarithms.
    pub fn from_samples(times: Vec<T>, values: Vec<Mat<T>>, tol_symplectic: T) -> Result<Self> {
        Self::check_samples(&times, &values, tol_symplectic)?;
        let generators = (0..times.len() - 1)
            .map(|i| segment_generator(&values[i], &values[i + 1]).ok_or_else(|| Error::Undersampled {
                time: times[i].to_f64_lossy(),
                reason: "consecutive samples are too far apart to interpolate".into(),
            }))
            .collect::<Result<Vec<_>>>()?;
        let n = values[0].nrows() / 2;
        let based = max_abs(&(&values[0] - Mat::identity(2 * n, 2 * n))) == T::zero();
        Ok(SymplecticPath { n, times, values, generators, based })
    }

    /// Samples a closure at the given times.
    pub fn from_fn(times: Vec<T>, f: impl Fn(T) -> Mat<T>, tol_symplectic: T) -> Result<Self> {
        let values = times.iter().map(|t| f(*t)).collect();
        Self::from_samples(times, values, tol_symplectic)
    }

    /// Path with known segment generators (`values[i+1] = values[i]·exp(generators[i])`).
    pub(crate) fn from_parts(times: Vec<T>, values: Vec<Mat<T>>, generators: Vec<Mat<T>>) -> Self {
        let n = values[0].nrows() / 2;
        let based = max_abs(&(&values[0] - Mat::identity(2 * n, 2 * n))) == T::zero();
        SymplecticPath { n, times, values, generators, based }
    }

    pub(crate) fn generators(&self) -> &[Mat<T>] {
        &self.generators
    }

    fn check_samples(times: &[T], values: &[Mat<T>], tol: T) -> Result<()> {
        if times.len() < 2 || times.len() != values.len() {
            return Err(Error::InvalidInput(format!(
                "path needs at least two samples with matching times ({} times, {} matrices)",
                times.len(),
                values.len()
            )));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("sample times must be strictly increasing".into()));
        }
        let dim = values[0].nrows();
        if dim == 0 || dim % 2 != 0 {
            return Err(Error::InvalidInput(format!("matrices must be 2n x 2n, got dimension {dim}")));
        }
        for (t, v) in times.iter().zip(values) {
            if v.shape() != (dim, dim) {
                return Err(Error::InvalidInput("all path matrices must share one shape".into()));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput(format!("non-finite entry at t = {}", t.to_f64_lossy())));
            }
            let drift = symplectic_residual(v);
            if drift > tol * (T::one() + max_abs(v)) {
                return Err(Error::SymplecticityLost { drift: drift.to_f64_lossy(), tol: tol.to_f64_lossy() });
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn values(&self) -> &[Mat<T>] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn start(&self) -> T {
        self.times[0]
    }

    pub fn end(&self) -> T {
        self.times[self.times.len() - 1]
    }

    /// `Φ(a) = I` exactly.
    pub fn is_based(&self) -> bool {
        self.based
    }

    pub fn first(&self) -> &Mat<T> {
        &self.values[0]
    }

    pub fn last(&self) -> &Mat<T> {
        &self.values[self.values.len() - 1]
    }

    /// Segment index containing `t` (clamped to the first/last segment).
    fn segment(&self, t: T) -> usize {
        let last = self.times.len() - 2;
        match self.times.binary_search_by(|x| x.partial_cmp(&t).unwrap_or(std::cmp::Ordering::Less)) {
            Ok(i) => i.min(last),
            Err(0) => 0,
            Err(i) => (i - 1).min(last),
        }
    }

    pub fn eval(&self, t: T) -> Mat<T> {
        let i = self.segment(t);
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        if t == t0 {
            return self.values[i].clone();
        }
        if t == t1 {
            return self.values[i + 1].clone();
        }
        let s = (t - t0) / (t1 - t0);
        &self.values[i] * expm(&(&self.generators[i] * s))
    }

    /// `Φ̇(t)` of the interpolant.
    pub fn derivative(&self, t: T) -> Mat<T> {
        let i = self.segment(t);
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let s = (t - t0) / (t1 - t0);
        &self.values[i] * expm(&(&self.generators[i] * s)) * &self.generators[i] / (t1 - t0)
    }

    /// Induced 1-norm of each segment generator; bounds how far eigen-angles
    /// can travel within a segment.
    pub fn segment_spread(&self, i: usize) -> T {
        norm1(&self.generators[i])
    }

    /// Largest symplecticity residual over the samples.
    pub fn max_residual(&self) -> T {
        self.values.iter().map(symplectic_residual).fold(T::zero(), |a, b| a.max(b))
    }

    /// Pointwise product `M(t)·Φ(t)` sampled at this path's times.
    pub fn left_multiplied(&self, f: impl Fn(T) -> Mat<T>, tol: T) -> Result<Self> {
        let values = self.times.iter().zip(&self.values).map(|(t, v)| f(*t) * v).collect();
        Self::from_samples(self.times.clone(), values, tol)
    }

    /// The path `t ↦ Φ(a + b − t)` on the same interval.
    pub fn time_reversed(&self) -> Self {
        let (a, b) = (self.start(), self.end());
        let times: Vec<T> = self.times.iter().rev().map(|t| a + b - *t).collect();
        let values: Vec<Mat<T>> = self.values.iter().rev().cloned().collect();
        let generators: Vec<Mat<T>> = self.generators.iter().rev().map(|g| -g).collect();
        Self::from_parts(times, values, generators)
    }

    /// Restriction to the samples in `[a, b]`, adding the endpoints when they
    /// fall between samples.
    pub fn restricted(&self, a: T, b: T) -> Self {
        let mut times = vec![a];
        let mut values = vec![self.eval(a)];
        for (t, v) in self.times.iter().zip(&self.values) {
            if *t > a && *t < b {
                times.push(*t);
                values.push(v.clone());
            }
        }
        times.push(b);
        values.push(self.eval(b));
        let generators = (0..times.len() - 1)
            .map(|k| {
                let mid = (times[k] + times[k + 1]) * T::lit(0.5);
                let i = self.segment(mid);
                let scale = (times[k + 1] - times[k]) / (self.times[i + 1] - self.times[i]);
                &self.generators[i] * scale
            })
            .collect();
        Self::from_parts(times, values, generators)
    }
}

fn segment_generator<T: Real>(from: &Mat<T>, to: &Mat<T>) -> Option<Mat<T>> {
    let step = symplectic_inverse(from) * to;
    let g = logm(&step)?;
    if g.iter().any(|x| !x.is_finite()) {
        return None;
    }
    Some(project_hamiltonian(&g))
}

/// `t ↦ diag(R(ωt), …, R(ωt)) = exp(ωtJ₀)` on `[a, b]` with `samples` equally spaced points.
pub fn rotation_path<T: Real>(omega: T, n: usize, interval: (T, T), samples: usize) -> Result<SymplecticPath<T>> {
    let (a, b) = interval;
    if samples < 2 || n == 0 || !(b > a) {
        return Err(Error::InvalidInput("rotation path needs n >= 1, samples >= 2 and a < b".into()));
    }
    let j = j0::<T>(n);
    let dt = (b - a) / T::from_usize_lossy(samples - 1);
    let times: Vec<T> =
        (0..samples).map(|k| if k == samples - 1 { b } else { a + dt * T::from_usize_lossy(k) }).collect();
    let values = times.iter().map(|t| expm(&(&j * (omega * *t)))).collect();
    let generators = times.windows(2).map(|w| &j * (omega * (w[1] - w[0]))).collect();
    Ok(SymplecticPath::from_parts(times, values, generators))
}

/// Fundamental solution of `γ̇ = J₀B(t)γ`, `γ(0) = I` on `[0, τ]` by fixed-step
/// classical RK4, with a first-order symplectic correction after each step.
pub fn fundamental_solution<T: Real>(
    b: impl Fn(T) -> Mat<T>,
    tau: T,
    steps: usize,
    cfg: &Config,
) -> Result<SymplecticPath<T>> {
    if steps < 2 || !(tau > T::zero()) {
        return Err(Error::InvalidInput("fundamental solution needs steps >= 2 and tau > 0".into()));
    }
    let b0 = b(T::zero());
    let dim = b0.nrows();
    if dim == 0 || dim % 2 != 0 || b0.ncols() != dim {
        return Err(Error::InvalidInput(format!("B(t) must be 2n x 2n, got {}x{}", dim, b0.ncols())));
    }
    let n = dim / 2;
    let j = j0::<T>(n);
    let tol = T::lit(cfg.tol_symplectic);
    let half = T::lit(0.5);
    let h = tau / T::from_usize_lossy(steps);
    let field = |t: T, g: &Mat<T>| -> Result<Mat<T>> {
        let bt = b(t);
        let asym = crate::linalg::asymmetry(&bt);
        if asym > tol * (T::one() + max_abs(&bt)) {
            return Err(Error::InvalidInput(format!(
                "B(t) is not symmetric at t = {} (asymmetry {:.3e})",
                t.to_f64_lossy(),
                asym.to_f64_lossy()
            )));
        }
        Ok(&j * bt * g)
    };

    let mut times = Vec::with_capacity(steps + 1);
    let mut values = Vec::with_capacity(steps + 1);
    let mut g = Mat::<T>::identity(dim, dim);
    times.push(T::zero());
    values.push(g.clone());
    for k in 0..steps {
        let t = h * T::from_usize_lossy(k);
        let k1 = field(t, &g)?;
        let k2 = field(t + h * half, &(&g + &k1 * (h * half)))?;
        let k3 = field(t + h * half, &(&g + &k2 * (h * half)))?;
        let k4 = field(t + h, &(&g + &k3 * h))?;
        g += (k1 + (k2 + k3) * T::lit(2.0) + k4) * (h / T::lit(6.0));
        // Newton step toward Sp(2n): M ← M(I + ½J₀G), G = MᵀJ₀M − J₀.
        let defect = g.transpose() * &j * &g - &j;
        g = &g * (Mat::identity(dim, dim) + &j * defect * half);
        let drift = symplectic_residual(&g);
        if !(drift <= tol * (T::one() + max_abs(&g))) {
            return Err(Error::SymplecticityLost { drift: drift.to_f64_lossy(), tol: cfg.tol_symplectic });
        }
        times.push(if k + 1 == steps { tau } else { h * T::from_usize_lossy(k + 1) });
        values.push(g.clone());
    }
    let generators = (0..steps)
        .map(|i| {
            segment_generator(&values[i], &values[i + 1]).ok_or_else(|| Error::SymplecticityLost {
                drift: f64::INFINITY,
                tol: cfg.tol_symplectic,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SymplecticPath::from_parts(times, values, generators))
}
