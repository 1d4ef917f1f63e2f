//! Brake-symmetric Hamiltonian systems on `R^{2n}`: orbits of `ẋ = J₀∇H(x)`,
//! brake-orbit shooting, linearized flows and the Reeb proportionality
//! factor on star-shaped levels.
//!
//! Coordinates are `x = (p, q)` with `p, q ∈ Rⁿ`; the brake Lagrangian is the
//! fixed set `L = {(0, q)}` of `N₀`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::linalg::{asymmetry, j0, max_abs, n0, Mat, Vector};
use crate::symplectic::{fundamental_solution, SymplecticPath};
use crate::{Config, Error, Real, Result};

/// A Hamiltonian with analytic derivatives.
pub trait HamiltonianSystem<T: Real>: Send + Sync {
    fn n(&self) -> usize;
    fn value(&self, x: &Vector<T>) -> T;
    fn grad(&self, x: &Vector<T>) -> Vector<T>;
    fn hess(&self, x: &Vector<T>) -> Mat<T>;
    /// Claimed `H(N₀x) = H(x)`.
    fn symmetric(&self) -> bool;

    /// `X_H(x) = J₀∇H(x)`.
    fn field(&self, x: &Vector<T>) -> Vector<T> {
        j0::<T>(self.n()) * self.grad(x)
    }
}

/// `H = ½Σ(pᵢ² + wᵢqᵢ²)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quadratic<T: Real> {
    pub weights: Vec<T>,
}

/// `H = ½|x|²`.
pub fn harmonic<T: Real>(n: usize) -> Quadratic<T> {
    Quadratic { weights: vec![T::one(); n] }
}

/// `H = ½Σ(pᵢ² + wᵢqᵢ²)`.
pub fn aniso<T: Real>(weights: Vec<T>) -> Quadratic<T> {
    Quadratic { weights }
}

impl<T: Real> HamiltonianSystem<T> for Quadratic<T> {
    fn n(&self) -> usize {
        self.weights.len()
    }

    fn value(&self, x: &Vector<T>) -> T {
        let n = self.n();
        let mut h = T::zero();
        for i in 0..n {
            h += x[i] * x[i] + self.weights[i] * x[n + i] * x[n + i];
        }
        h * T::lit(0.5)
    }

    fn grad(&self, x: &Vector<T>) -> Vector<T> {
        let n = self.n();
        Vector::from_fn(2 * n, |k, _| if k < n { x[k] } else { self.weights[k - n] * x[k] })
    }

    fn hess(&self, _x: &Vector<T>) -> Mat<T> {
        let n = self.n();
        Mat::from_fn(2 * n, 2 * n, |r, c| {
            if r != c {
                T::zero()
            } else if r < n {
                T::one()
            } else {
                self.weights[r - n]
            }
        })
    }

    fn symmetric(&self) -> bool {
        true
    }
}

/// One monomial `coeff · Π xᵢ^{powers[i]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term<T> {
    pub coeff: T,
    pub powers: Vec<u32>,
}

/// A polynomial Hamiltonian in `2n` variables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polynomial<T> {
    pub n: usize,
    pub terms: Vec<Term<T>>,
}

impl<T: Real> Polynomial<T> {
    pub fn new(n: usize, terms: Vec<Term<T>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("polynomial needs n >= 1".into()));
        }
        if let Some(t) = terms.iter().find(|t| t.powers.len() != 2 * n) {
            return Err(Error::InvalidInput(format!("term has {} exponents, expected {}", t.powers.len(), 2 * n)));
        }
        Ok(Polynomial { n, terms })
    }

    /// Every nonzero monomial is even in each `pᵢ`, which makes `H(N₀x) = H(x)` exact.
    pub fn is_even_in_p(&self) -> bool {
        self.terms.iter().filter(|t| t.coeff != T::zero()).all(|t| t.powers[..self.n].iter().all(|e| e % 2 == 0))
    }
}

fn powi<T: Real>(x: T, e: u32) -> T {
    (0..e).fold(T::one(), |acc, _| acc * x)
}

impl<T: Real> HamiltonianSystem<T> for Polynomial<T> {
    fn n(&self) -> usize {
        self.n
    }

    fn value(&self, x: &Vector<T>) -> T {
        self.terms
            .iter()
            .map(|t| t.powers.iter().enumerate().fold(t.coeff, |acc, (i, e)| acc * powi(x[i], *e)))
            .fold(T::zero(), |a, b| a + b)
    }

    fn grad(&self, x: &Vector<T>) -> Vector<T> {
        let dim = 2 * self.n;
        let mut g = Vector::zeros(dim);
        for t in &self.terms {
            for k in 0..dim {
                if t.powers[k] == 0 {
                    continue;
                }
                let mut v = t.coeff * T::lit(t.powers[k] as f64);
                for (i, e) in t.powers.iter().enumerate() {
                    v *= powi(x[i], if i == k { *e - 1 } else { *e });
                }
                g[k] += v;
            }
        }
        g
    }

    fn hess(&self, x: &Vector<T>) -> Mat<T> {
        let dim = 2 * self.n;
        let mut h = Mat::zeros(dim, dim);
        for t in &self.terms {
            for a in 0..dim {
                for b in a..dim {
                    let mut e = t.powers.clone();
                    let mut v = t.coeff;
                    for k in [a, b] {
                        if e[k] == 0 {
                            v = T::zero();
                            break;
                        }
                        v *= T::lit(e[k] as f64);
                        e[k] -= 1;
                    }
                    if v == T::zero() {
                        continue;
                    }
                    for (i, ei) in e.iter().enumerate() {
                        v *= powi(x[i], *ei);
                    }
                    h[(a, b)] += v;
                    if a != b {
                        h[(b, a)] += v;
                    }
                }
            }
        }
        h
    }

    fn symmetric(&self) -> bool {
        self.is_even_in_p()
    }
}

type ScalarFn<T> = Arc<dyn Fn(&Vector<T>) -> T + Send + Sync>;
type VectorFn<T> = Arc<dyn Fn(&Vector<T>) -> Vector<T> + Send + Sync>;
type MatrixFn<T> = Arc<dyn Fn(&Vector<T>) -> Mat<T> + Send + Sync>;

/// A system given by closures, checked against finite differences on
/// construction.
#[derive(Clone)]
pub struct FnSystem<T: Real> {
    n: usize,
    h: ScalarFn<T>,
    grad: VectorFn<T>,
    hess: MatrixFn<T>,
    symmetric: bool,
}

impl<T: Real> FnSystem<T> {
    pub fn new(
        n: usize,
        symmetric: bool,
        h: impl Fn(&Vector<T>) -> T + Send + Sync + 'static,
        grad: impl Fn(&Vector<T>) -> Vector<T> + Send + Sync + 'static,
        hess: impl Fn(&Vector<T>) -> Mat<T> + Send + Sync + 'static,
    ) -> Result<Self> {
        let s = FnSystem { n, h: Arc::new(h), grad: Arc::new(grad), hess: Arc::new(hess), symmetric };
        let report = consistency(&s, &probes(n, 8, 1.0, 7));
        report.check()?;
        Ok(s)
    }
}

impl<T: Real> HamiltonianSystem<T> for FnSystem<T> {
    fn n(&self) -> usize {
        self.n
    }

    fn value(&self, x: &Vector<T>) -> T {
        (self.h)(x)
    }

    fn grad(&self, x: &Vector<T>) -> Vector<T> {
        (self.grad)(x)
    }

    fn hess(&self, x: &Vector<T>) -> Mat<T> {
        (self.hess)(x)
    }

    fn symmetric(&self) -> bool {
        self.symmetric
    }
}

/// Seeded probe points, uniform in `[−radius, radius]^{2n}`.
pub fn probes<T: Real>(n: usize, count: usize, radius: f64, seed: u64) -> Vec<Vector<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| Vector::from_fn(2 * n, |_, _| T::lit(rng.gen_range(-radius..=radius)))).collect()
}

/// Largest relative mismatches found by [`consistency`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Consistency {
    pub grad: f64,
    pub hess: f64,
    pub hess_asymmetry: f64,
    /// `max |H(N₀x) − H(x)|`, only meaningful for symmetric claims.
    pub symmetry: f64,
    pub symmetric_claim: bool,
}

impl Consistency {
    /// `grad`/`hess` within `10⁻⁴` relative and, for symmetric claims,
    /// `|H(N₀x) − H(x)| ≤ 10⁻¹⁰`.
    pub fn check(&self) -> Result<()> {
        if self.grad > 1e-4 || self.hess > 1e-4 || self.hess_asymmetry > 1e-10 {
            return Err(Error::InvalidInput(format!(
                "derivatives disagree with finite differences (grad {:.2e}, hess {:.2e}, asymmetry {:.2e})",
                self.grad, self.hess, self.hess_asymmetry
            )));
        }
        if self.symmetric_claim && self.symmetry > 1e-10 {
            return Err(Error::SymmetryViolated { residual: self.symmetry, tol: 1e-10 });
        }
        Ok(())
    }
}

/// Compares `grad` and `hess` with centred differences of `H` and of `grad`.
pub fn consistency<T: Real>(system: &dyn HamiltonianSystem<T>, points: &[Vector<T>]) -> Consistency {
    let dim = 2 * system.n();
    let nn = n0::<T>(system.n());
    let eps = T::default_epsilon().cbrt();
    let mut out = Consistency { grad: 0.0, hess: 0.0, hess_asymmetry: 0.0, symmetry: 0.0, symmetric_claim: system.symmetric() };
    for x in points {
        let g = system.grad(x);
        let hs = system.hess(x);
        let gscale = g.amax().max(T::one());
        let hscale = max_abs(&hs).max(T::one());
        for k in 0..dim {
            let step = eps * x[k].abs().max(T::one());
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[k] += step;
            xm[k] -= step;
            let fd = (system.value(&xp) - system.value(&xm)) / (step + step);
            out.grad = out.grad.max(((fd - g[k]).abs() / gscale).to_f64_lossy());
            let col = (system.grad(&xp) - system.grad(&xm)) / (step + step);
            for r in 0..dim {
                out.hess = out.hess.max(((col[r] - hs[(r, k)]).abs() / hscale).to_f64_lossy());
            }
        }
        out.hess_asymmetry = out.hess_asymmetry.max((asymmetry(&hs) / hscale).to_f64_lossy());
        out.symmetry = out.symmetry.max((system.value(&(&nn * x)) - system.value(x)).abs().to_f64_lossy());
    }
    out
}

/// `max ‖J₀∇H(N₀x) + N₀J₀∇H(x)‖` over the probes; zero for `H(N₀x) = H(x)`.
pub fn check_field_symmetry<T: Real>(system: &dyn HamiltonianSystem<T>, points: &[Vector<T>]) -> T {
    let nn = n0::<T>(system.n());
    points
        .iter()
        .map(|x| (system.field(&(&nn * x)) + &nn * system.field(x)).norm())
        .fold(T::zero(), |a, b| a.max(b))
}

/// A sampled trajectory with dense output by cubic Hermite interpolation.
#[derive(Clone, Debug)]
pub struct Orbit<T: Real> {
    pub times: Vec<T>,
    pub states: Vec<Vector<T>>,
    /// `ẋ` at each sample.
    pub velocities: Vec<Vector<T>>,
    /// Integration span; the period when the orbit closes.
    pub period: T,
    pub energy: T,
    pub brake: bool,
    /// Largest `|H(x(t)) − h|` along the samples.
    pub energy_drift: T,
}

impl<T: Real> Orbit<T> {
    /// `x(t)` for `t` in the sampled span, extended periodically when `t`
    /// falls outside it.
    pub fn state_at(&self, t: T) -> Vector<T> {
        let mut s = t % self.period;
        if s < T::zero() {
            s += self.period;
        }
        let last = self.times.len() - 1;
        let i = match self.times.binary_search_by(|x| x.partial_cmp(&s).unwrap_or(std::cmp::Ordering::Less)) {
            Ok(i) => return self.states[i].clone(),
            Err(0) => 0,
            Err(i) => (i - 1).min(last - 1),
        };
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let h = t1 - t0;
        let u = (s - t0) / h;
        let (u2, u3) = (u * u, u * u * u);
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let h00 = two * u3 - three * u2 + T::one();
        let h10 = u3 - two * u2 + u;
        let h01 = -two * u3 + three * u2;
        let h11 = u3 - u2;
        &self.states[i] * h00 + &self.velocities[i] * (h10 * h) + &self.states[i + 1] * h01 + &self.velocities[i + 1] * (h11 * h)
    }

    pub fn start(&self) -> &Vector<T> {
        &self.states[0]
    }

    /// `max ‖x(−t) − N₀x(t)‖` over the samples, using periodicity.
    pub fn brake_residual(&self) -> T {
        let n = self.states[0].len() / 2;
        let nn = n0::<T>(n);
        self.times
            .iter()
            .zip(&self.states)
            .map(|(t, x)| (self.state_at(-*t) - &nn * x).norm())
            .fold(T::zero(), |a, b| a.max(b))
    }
}

fn rk4_step<T: Real>(system: &dyn HamiltonianSystem<T>, x: &Vector<T>, h: T) -> Vector<T> {
    let half = T::lit(0.5);
    let k1 = system.field(x);
    let k2 = system.field(&(x + &k1 * (h * half)));
    let k3 = system.field(&(x + &k2 * (h * half)));
    let k4 = system.field(&(x + &k3 * h));
    x + (k1 + (k2 + k3) * T::lit(2.0) + k4) * (h / T::lit(6.0))
}

/// Fixed-step RK4 trajectory of `ẋ = J₀∇H(x)` over `[0, T]`.
///
/// Fails with EnergyDrift when `|H(x(t)) − H(x₀)|` exceeds `10⁻⁶·max(1, |H(x₀)|)`.
pub fn integrate_orbit<T: Real>(system: &dyn HamiltonianSystem<T>, x0: &Vector<T>, span: T, steps: usize) -> Result<Orbit<T>> {
    if steps < 2 || !(span > T::zero()) {
        return Err(Error::InvalidInput("integration needs steps >= 2 and a positive span".into()));
    }
    if x0.len() != 2 * system.n() {
        return Err(Error::InvalidInput(format!("initial point has {} coordinates, expected {}", x0.len(), 2 * system.n())));
    }
    let h = span / T::from_usize_lossy(steps);
    let energy = system.value(x0);
    let tol = T::lit(1e-6) * energy.abs().max(T::one());
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut x = x0.clone();
    let mut drift = T::zero();
    times.push(T::zero());
    states.push(x.clone());
    for k in 0..steps {
        x = rk4_step(system, &x, h);
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::EnergyDrift { drift: f64::INFINITY, tol: tol.to_f64_lossy() });
        }
        drift = drift.max((system.value(&x) - energy).abs());
        times.push(if k + 1 == steps { span } else { h * T::from_usize_lossy(k + 1) });
        states.push(x.clone());
    }
    if drift > tol {
        return Err(Error::EnergyDrift { drift: drift.to_f64_lossy(), tol: tol.to_f64_lossy() });
    }
    let velocities = states.iter().map(|s| system.field(s)).collect();
    Ok(Orbit { times, states, velocities, period: span, energy, brake: false, energy_drift: drift })
}

/// Point on `L`: `(0, q)`.
fn on_l<T: Real>(q: &Vector<T>) -> Vector<T> {
    let n = q.len();
    Vector::from_fn(2 * n, |k, _| if k < n { T::zero() } else { q[k - n] })
}

/// Scales `q` radially so that `H(0, λq) = h`, by Newton's method in `λ`.
fn to_energy<T: Real>(system: &dyn HamiltonianSystem<T>, q: &Vector<T>, h: T) -> Result<Vector<T>> {
    if q.norm() == T::zero() {
        return Err(Error::LeftEnergySurface("initial guess is the origin".into()));
    }
    let mut lambda = T::one();
    for _ in 0..60 {
        let x = on_l(&(q * lambda));
        let f = system.value(&x) - h;
        if f.abs() <= T::lit(1e-14) * h.abs().max(T::one()) {
            return Ok(q * lambda);
        }
        let slope = system.grad(&x).dot(&on_l(q));
        if slope.abs() < T::lit(1e-14) {
            return Err(Error::LeftEnergySurface("H is stationary along the ray through the guess".into()));
        }
        let next = lambda - f / slope;
        lambda = if next > T::zero() { next } else { lambda * T::lit(0.5) };
    }
    Err(Error::LeftEnergySurface("could not rescale the guess onto the energy level".into()))
}

/// A brake orbit: `x(0), x(τ/2) ∈ L`, `x(−t) = N₀x(t)`.
#[derive(Clone, Debug)]
pub struct BrakeOrbit<T: Real> {
    pub period: T,
    pub orbit: Orbit<T>,
    pub residual: T,
    pub iterations: usize,
}

/// Shooting from `(0, q)` for a time `σ ≈ τ/2` until the `p`-part of `x(σ)`
/// vanishes, by damped Newton with a finite-difference Jacobian on the
/// unknowns `(q, σ)` and the residual `(p(σ), H(0, q) − h)`. After each
/// update `q` is rescaled radially onto the level `h`.
pub fn find_brake_orbit<T: Real>(
    system: &dyn HamiltonianSystem<T>,
    guess: &Vector<T>,
    h: T,
    tau_guess: T,
    cfg: &Config,
) -> Result<BrakeOrbit<T>> {
    let n = system.n();
    if guess.len() != 2 * n {
        return Err(Error::InvalidInput(format!("guess has {} coordinates, expected {}", guess.len(), 2 * n)));
    }
    if guess.rows(0, n).amax() > T::lit(1e-12) {
        return Err(Error::InvalidInput("guess must lie on L (first n coordinates zero)".into()));
    }
    if !(tau_guess > T::zero()) {
        return Err(Error::InvalidInput("period guess must be positive".into()));
    }
    if system.grad(guess).norm() < T::lit(1e-12) {
        return Err(Error::LeftEnergySurface("guess is a critical point of H".into()));
    }
    let steps = (cfg.ode_steps / 2).max(16);
    let shoot = |q: &Vector<T>, sigma: T| -> Vector<T> {
        let mut x = on_l(q);
        let dt = sigma / T::from_usize_lossy(steps);
        for _ in 0..steps {
            x = rk4_step(system, &x, dt);
        }
        let mut r = Vector::zeros(n + 1);
        r.rows_mut(0, n).copy_from(&x.rows(0, n));
        r[n] = system.value(&on_l(q)) - h;
        r
    };
    let mut q = to_energy(system, &guess.rows(n, n).into_owned(), h)?;
    let mut sigma = tau_guess * T::lit(0.5);
    let mut r = shoot(&q, sigma);
    let target = T::lit(1e-8);
    let mut iterations = 0;
    while r.norm() >= target {
        if iterations >= cfg.shooting_max_iter {
            return Err(Error::NoConvergence { iterations, residual: r.norm().to_f64_lossy() });
        }
        iterations += 1;
        let fd = T::default_epsilon().sqrt();
        let mut jac = Mat::zeros(n + 1, n + 1);
        for k in 0..=n {
            let (mut qp, mut sp) = (q.clone(), sigma);
            let step = if k < n { fd * q[k].abs().max(T::one()) } else { fd * sigma.abs().max(T::one()) };
            if k < n {
                qp[k] += step;
            } else {
                sp += step;
            }
            jac.set_column(k, &((shoot(&qp, sp) - &r) / step));
        }
        let delta = jac
            .clone()
            .lu()
            .solve(&(-&r))
            .or_else(|| jac.clone().svd(true, true).solve(&(-&r), T::default_epsilon()).ok())
            .ok_or(Error::NoConvergence { iterations, residual: r.norm().to_f64_lossy() })?;
        let mut damping = T::one();
        let mut accepted = false;
        for _ in 0..30 {
            let qn = &q + delta.rows(0, n) * damping;
            let sn = sigma + delta[n] * damping;
            if sn > T::zero() {
                if let Ok(qn) = to_energy(system, &qn, h) {
                    let rn = shoot(&qn, sn);
                    if rn.norm() < r.norm() {
                        q = qn;
                        sigma = sn;
                        r = rn;
                        accepted = true;
                        break;
                    }
                }
            }
            damping *= T::lit(0.5);
        }
        if !accepted {
            return Err(Error::NoConvergence { iterations, residual: r.norm().to_f64_lossy() });
        }
    }
    let period = sigma + sigma;
    let mut orbit = integrate_orbit(system, &on_l(&q), period, cfg.ode_steps.max(16))?;
    orbit.brake = true;
    Ok(BrakeOrbit { period, orbit, residual: r.norm(), iterations })
}

/// Fundamental solution of `ẏ = J₀H''(x(t))y` along the orbit, with the
/// orbit's own step count.
pub fn linearized_path<T: Real>(system: &dyn HamiltonianSystem<T>, orbit: &Orbit<T>, cfg: &Config) -> Result<SymplecticPath<T>> {
    let steps = orbit.times.len() - 1;
    fundamental_solution(|t| system.hess(&orbit.state_at(t)), orbit.period, steps, cfg)
}

/// `max_t ‖N₀B(−t)N₀ − B(t)‖` for `B(t) = H''(x(t))` along the orbit.
pub fn hessian_brake_residual<T: Real>(system: &dyn HamiltonianSystem<T>, orbit: &Orbit<T>) -> T {
    crate::symplectic::brake_residual(|t| system.hess(&orbit.state_at(t)), &orbit.times, system.n())
}

/// `f` with `R_α = f·X_H` at a point of a regular level, for the Liouville
/// form `α = ½Σ(p dq − q dp)`: `f = 1 / (½⟨x, ∇H(x)⟩)`.
pub fn reeb_factor<T: Real>(system: &dyn HamiltonianSystem<T>, x: &Vector<T>) -> Result<T> {
    let pairing = x.dot(&system.grad(x)) * T::lit(0.5);
    if pairing.abs() < T::lit(1e-10) {
        return Err(Error::RadialDegeneracy { pairing: pairing.to_f64_lossy() });
    }
    Ok(T::one() / pairing)
}
