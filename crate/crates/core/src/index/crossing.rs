//! Robbin–Salamon index of a pair of Lagrangian paths from crossing forms.

use serde::{Deserialize, Serialize};

use crate::linalg::{orthonormal_frame, symmetric_eigenvalues, Mat};
use crate::symplectic::{graph, stacked, Ambient, Lagrangian, SymplecticPath};
use crate::{Config, Error, HalfInt, Real, Result};

/// A continuous family of Lagrangian subspaces, given by spanning frames.
pub trait LagrangianPath<T: Real> {
    fn ambient(&self) -> Ambient;

    /// A frame spanning `Λ(t)`; any basis, not necessarily orthonormal.
    fn frame(&self, t: T) -> Mat<T>;

    /// Interior times in `(a, b)` at which the rank indicator is sampled.
    fn scan_times(&self, a: T, b: T) -> Vec<T>;

    fn is_constant(&self) -> bool {
        false
    }
}

impl<T: Real> LagrangianPath<T> for Lagrangian<T> {
    fn ambient(&self) -> Ambient {
        Lagrangian::ambient(self)
    }

    fn frame(&self, _t: T) -> Mat<T> {
        Lagrangian::frame(self).clone()
    }

    fn scan_times(&self, _a: T, _b: T) -> Vec<T> {
        Vec::new()
    }

    fn is_constant(&self) -> bool {
        true
    }
}

/// `t ↦ Φ(t)L`.
pub struct Transported<'a, T: Real> {
    pub path: &'a SymplecticPath<T>,
    pub base: &'a Lagrangian<T>,
}

impl<T: Real> LagrangianPath<T> for Transported<'_, T> {
    fn ambient(&self) -> Ambient {
        Ambient::Standard
    }

    fn frame(&self, t: T) -> Mat<T> {
        self.path.eval(t) * self.base.frame()
    }

    fn scan_times(&self, a: T, b: T) -> Vec<T> {
        path_scan_times(self.path, a, b)
    }
}

/// `t ↦ Gr(Φ(t)) ⊂ R^{4n}`.
pub struct GraphPath<'a, T: Real> {
    pub path: &'a SymplecticPath<T>,
}

impl<T: Real> LagrangianPath<T> for GraphPath<'_, T> {
    fn ambient(&self) -> Ambient {
        Ambient::Product
    }

    fn frame(&self, t: T) -> Mat<T> {
        let phi = self.path.eval(t);
        let dim = phi.nrows();
        let mut f = Mat::zeros(2 * dim, dim);
        f.view_mut((0, 0), (dim, dim)).copy_from(&Mat::identity(dim, dim));
        f.view_mut((dim, 0), (dim, dim)).copy_from(&phi);
        f
    }

    fn scan_times(&self, a: T, b: T) -> Vec<T> {
        path_scan_times(self.path, a, b)
    }
}

/// Sample times of the path inside `(a, b)`, with extra points in segments
/// whose generator could turn an eigen-angle by more than `π/8`.
fn path_scan_times<T: Real>(path: &SymplecticPath<T>, a: T, b: T) -> Vec<T> {
    let limit = T::pi() / T::lit(8.0);
    let times = path.times();
    let mut out = Vec::new();
    for i in 0..times.len() - 1 {
        let (t0, t1) = (times[i], times[i + 1]);
        if t1 <= a || t0 >= b {
            continue;
        }
        if t0 > a && t0 < b {
            out.push(t0);
        }
        let spread = path.segment_spread(i);
        if spread > limit {
            let pieces = (spread / limit).ceil().to_f64_lossy() as usize;
            for k in 1..pieces {
                let t = t0 + (t1 - t0) * T::from_usize_lossy(k) / T::from_usize_lossy(pieces);
                if t > a && t < b {
                    out.push(t);
                }
            }
        }
    }
    out
}

/// One crossing of the pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub time: f64,
    pub intersection_dim: usize,
    /// Signature of the relative crossing form on the intersection.
    pub signature: i64,
    pub regular: bool,
    /// Endpoint crossings carry half weight.
    pub endpoint: bool,
}

impl Crossing {
    /// Contribution to the index.
    pub fn weight(&self) -> HalfInt {
        if self.endpoint {
            HalfInt::halves(self.signature)
        } else {
            HalfInt::from_int(self.signature)
        }
    }
}

/// Result of [`rs_index`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    pub value: HalfInt,
    pub crossings: Vec<Crossing>,
    /// `(dim Λ₁(a) ∩ Λ₂(a), dim Λ₁(b) ∩ Λ₂(b))`.
    pub endpoint_nullities: (usize, usize),
}

impl IndexReport {
    /// Re-assembles the value from the crossing list.
    pub fn recomputed(&self) -> HalfInt {
        self.crossings.iter().map(Crossing::weight).sum()
    }
}

struct Pair<'a, T: Real> {
    l1: &'a dyn LagrangianPath<T>,
    l2: &'a dyn LagrangianPath<T>,
}

impl<T: Real> Pair<'_, T> {
    fn frames(&self, t: T) -> (Mat<T>, Mat<T>) {
        (orthonormal_frame(&self.l1.frame(t)), orthonormal_frame(&self.l2.frame(t)))
    }

    fn singular_values(&self, t: T) -> Vec<T> {
        let (f1, f2) = self.frames(t);
        crate::linalg::singular_values_ascending(&stacked(&f1, &f2))
    }

    fn indicator(&self, t: T) -> T {
        self.singular_values(t)[0]
    }

    fn dim_at(&self, t: T, tol: T) -> usize {
        self.singular_values(t).iter().take_while(|s| **s < tol).count()
    }
}

/// Golden-section minimization of the rank indicator on `[lo, hi]`.
fn locate_minimum<T: Real>(pair: &Pair<'_, T>, mut lo: T, mut hi: T, tol_time: T) -> (T, T) {
    let ratio = T::lit(0.618_033_988_749_894_8);
    let mut best = (lo, pair.indicator(lo));
    let f_hi = pair.indicator(hi);
    if f_hi < best.1 {
        best = (hi, f_hi);
    }
    let mut x1 = hi - (hi - lo) * ratio;
    let mut x2 = lo + (hi - lo) * ratio;
    let mut f1 = pair.indicator(x1);
    let mut f2 = pair.indicator(x2);
    for _ in 0..200 {
        if hi - lo <= tol_time {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - (hi - lo) * ratio;
            f1 = pair.indicator(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + (hi - lo) * ratio;
            f2 = pair.indicator(x2);
        }
        for (x, f) in [(x1, f1), (x2, f2)] {
            if f < best.1 {
                best = (x, f);
            }
        }
    }
    best
}

/// Frobenius distance between the orthogonal projectors onto two frames.
fn projector_distance<T: Real>(f: &Mat<T>, g: &Mat<T>) -> T {
    (f * f.transpose() - g * g.transpose()).norm()
}

/// `ω(u, v) = uᵀΩv`.
fn form_value<T: Real>(omega: &Mat<T>, u: &Mat<T>, v: &Mat<T>) -> T {
    (u.transpose() * omega * v)[(0, 0)]
}

/// Matrix of `d/dt ω(vⱼ, wₖ(t))` at `t`, where `wₖ(t) ∈ Λ(t)` is the lift of
/// `vₖ` whose orthogonal projection to `Λ(t*)` is `vₖ`.
fn crossing_form_of<T: Real>(
    path: &dyn LagrangianPath<T>,
    omega: &Mat<T>,
    basis: &Mat<T>,
    t: T,
    h: T,
) -> Option<Mat<T>> {
    let d = basis.ncols();
    if path.is_constant() {
        return Some(Mat::zeros(d, d));
    }
    let q0 = orthonormal_frame(&path.frame(t));
    let coords = q0.transpose() * basis;
    let lift = |s: T| -> Option<Mat<T>> {
        let f = path.frame(s);
        let x = (q0.transpose() * &f).try_inverse()? * &coords;
        Some(f * x)
    };
    let plus = lift(t + h)?;
    let minus = lift(t - h)?;
    let mut m = Mat::zeros(d, d);
    for j in 0..d {
        let vj = basis.columns(j, 1).into_owned();
        for k in 0..d {
            let wp = plus.columns(k, 1).into_owned();
            let wm = minus.columns(k, 1).into_owned();
            m[(j, k)] = (form_value(omega, &vj, &wp) - form_value(omega, &vj, &wm)) / (h + h);
        }
    }
    Some(m)
}

/// Orthonormal basis of `Λ₁(t) ∩ Λ₂(t)` of dimension `d`.
fn intersection_basis<T: Real>(pair: &Pair<'_, T>, t: T, d: usize) -> Mat<T> {
    let (f1, f2) = pair.frames(t);
    let k1 = f1.ncols();
    let svd = stacked(&f1, &f2).svd(false, true);
    let vt = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|a, b| {
        svd.singular_values[*a].partial_cmp(&svd.singular_values[*b]).unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut vecs = Mat::zeros(f1.nrows(), d);
    for (col, idx) in order.iter().take(d).enumerate() {
        let coeff = vt.row(*idx).transpose();
        let alpha = coeff.rows(0, k1).into_owned();
        let beta = coeff.rows(k1, coeff.len() - k1).into_owned();
        let v = (&f1 * alpha - &f2 * beta) * T::lit(0.5);
        vecs.set_column(col, &v);
    }
    orthonormal_frame(&vecs)
}

#[allow(clippy::too_many_arguments)]
fn classify<T: Real>(
    pair: &Pair<'_, T>,
    omega: &Mat<T>,
    t: T,
    endpoint: bool,
    h: T,
    cfg: &Config,
) -> Result<Crossing> {
    let tol = T::lit(cfg.tol_rank);
    let d = pair.dim_at(t, tol).max(1);
    let basis = intersection_basis(pair, t, d);
    let lift_failed = || Error::Undersampled {
        time: t.to_f64_lossy(),
        reason: "Lagrangian lift is singular within the finite-difference step".into(),
    };
    let g2 = crossing_form_of(pair.l2, omega, &basis, t, h).ok_or_else(lift_failed)?;
    let g1 = crossing_form_of(pair.l1, omega, &basis, t, h).ok_or_else(lift_failed)?;
    let form = g2 - g1;
    let eig = symmetric_eigenvalues(&form);
    let smallest = eig.iter().fold(T::max_value().unwrap_or(T::lit(f64::MAX)), |a, b| a.min(b.abs()));
    if smallest < T::lit(cfg.tol_form) {
        return Err(Error::IrregularCrossing { time: t.to_f64_lossy(), eigenvalue: smallest.to_f64_lossy() });
    }
    let signature = eig.iter().map(|e| if *e > T::zero() { 1 } else { -1 }).sum();
    Ok(Crossing { time: t.to_f64_lossy(), intersection_dim: d, signature, regular: true, endpoint })
}

/// Robbin–Salamon index `μ(Λ₁, Λ₂)` over `[a, b]`:
/// `½ sign Γ(a) + Σ_{a<t<b} sign Γ(t) + ½ sign Γ(b)`, with `Γ` the relative
/// crossing form `Γ(Λ₂) − Γ(Λ₁)` restricted to the intersection.
///
/// Crossings are bracketed by local minima of the smallest singular value
/// of the stacked orthonormal frames and located by golden-section search
/// to `cfg.tol_time`.
pub fn rs_index<T: Real>(
    l1: &dyn LagrangianPath<T>,
    l2: &dyn LagrangianPath<T>,
    interval: (T, T),
    cfg: &Config,
) -> Result<IndexReport> {
    let (a, b) = interval;
    if !(b > a) {
        return Err(Error::InvalidInput("index interval must satisfy a < b".into()));
    }
    if l1.ambient() != l2.ambient() {
        return Err(Error::InvalidInput("Lagrangian paths live in different ambient spaces".into()));
    }
    let pair = Pair { l1, l2 };
    let f0 = l1.frame(a);
    let n = f0.ncols();
    let omega = match l1.ambient() {
        Ambient::Standard => crate::symplectic::standard_form::<T>(n),
        Ambient::Product => crate::symplectic::product_form::<T>(n / 2),
    };
    let tol = T::lit(cfg.tol_rank);
    let tol_time = T::lit(cfg.tol_time);
    let snap = tol_time * T::lit(100.0);
    let h = (b - a) * T::lit(1e-6);

    let mut times = vec![a];
    let mut interior = l1.scan_times(a, b);
    interior.extend(l2.scan_times(a, b));
    interior.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    interior.dedup();
    times.extend(interior);
    times.push(b);
    let frames: Vec<(Mat<T>, Mat<T>)> = times.iter().map(|t| pair.frames(*t)).collect();
    let sigma: Vec<T> = frames
        .iter()
        .map(|(f1, f2)| crate::linalg::singular_values_ascending(&stacked(f1, f2))[0])
        .collect();

    let start_dim = pair.dim_at(a, tol);
    let end_dim = pair.dim_at(b, tol);
    let mut crossings = Vec::new();
    if start_dim > 0 {
        crossings.push(classify(&pair, &omega, a, true, h, cfg)?);
    }

    // The indicator moves no faster than the subspaces do, so an interval can
    // only hide a zero when its endpoint values are small against the
    // distance the two subspaces travel across it.
    let mut interior_times: Vec<T> = Vec::new();
    for i in 0..times.len() - 1 {
        let travel = projector_distance(&frames[i].0, &frames[i + 1].0)
            + projector_distance(&frames[i].1, &frames[i + 1].1);
        if sigma[i] + sigma[i + 1] > T::lit(3.0) * travel + tol {
            continue;
        }
        let (lo, hi) = (times[i], times[i + 1]);
        let (t_star, value) = locate_minimum(&pair, lo, hi, tol_time);
        if value >= tol || t_star - a <= snap || b - t_star <= snap {
            continue;
        }
        if interior_times.iter().any(|t| (*t - t_star).abs() <= snap) {
            continue;
        }
        check_isolated(&pair, lo, hi, t_star, tol, tol_time, snap)?;
        interior_times.push(t_star);
    }
    interior_times.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    for t in interior_times {
        crossings.push(classify(&pair, &omega, t, false, h, cfg)?);
    }
    if end_dim > 0 {
        crossings.push(classify(&pair, &omega, b, true, h, cfg)?);
    }
    let value = crossings.iter().map(Crossing::weight).sum();
    Ok(IndexReport { value, crossings, endpoint_nullities: (start_dim, end_dim) })
}

/// Probes the bracket on either side of a located crossing for a second one.
fn check_isolated<T: Real>(
    pair: &Pair<'_, T>,
    lo: T,
    hi: T,
    t_star: T,
    tol: T,
    tol_time: T,
    snap: T,
) -> Result<()> {
    let gap = tol_time * T::lit(1e3);
    for (s0, s1) in [(lo, t_star - gap), (t_star + gap, hi)] {
        if !(s1 > s0) {
            continue;
        }
        let probes = 16usize;
        let pts: Vec<T> =
            (0..=probes).map(|k| s0 + (s1 - s0) * T::from_usize_lossy(k) / T::from_usize_lossy(probes)).collect();
        let vals: Vec<T> = pts.iter().map(|t| pair.indicator(*t)).collect();
        for k in 1..probes {
            if vals[k] <= vals[k - 1] && vals[k] <= vals[k + 1] {
                let (t2, v2) = locate_minimum(pair, pts[k - 1], pts[k + 1], tol_time);
                if v2 < tol && (t2 - t_star).abs() > snap && t2 > s0 && t2 < s1 {
                    return Err(Error::Undersampled {
                        time: t_star.to_f64_lossy(),
                        reason: format!("second crossing at t = {} within one sample interval", t2.to_f64_lossy()),
                    });
                }
            }
        }
    }
    Ok(())
}

/// `μ^{RS}(W, Gr(Φ))` over the path's interval.
pub fn graph_index<T: Real>(path: &SymplecticPath<T>, cfg: &Config) -> Result<IndexReport> {
    let w = graph(&Mat::<T>::identity(2 * path.n(), 2 * path.n()));
    rs_index(&w, &GraphPath { path }, (path.start(), path.end()), cfg)
}
