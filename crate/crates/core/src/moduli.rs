//! Dimension bookkeeping for moduli spaces of brake-symmetric curves:
//! Fredholm index, Teichmüller and automorphism dimensions, degrees, and
//! good/bad iterates.

use serde::{Deserialize, Serialize};

use crate::index::{cz_index, nullities};
use crate::linalg::Mat;
use crate::symplectic::{symplectic_inverse, SymplecticPath};
use crate::{Config, Error, HalfInt, Real, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitKind {
    BrakeOrbit,
    /// A symmetric pair `(p(t), Np(−t))`, counted once.
    ReebPair,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub label: String,
    pub kind: OrbitKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu1: Option<HalfInt>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_cz: Option<HalfInt>,
    /// `(ν, ν₁, ν₂)`.
    #[serde(default)]
    pub nullities: (usize, usize, usize),
    #[serde(default = "one")]
    pub multiplicity: usize,
    #[serde(default = "unit_period")]
    pub period: f64,
}

fn one() -> usize {
    1
}

fn unit_period() -> f64 {
    1.0
}

impl OrbitRecord {
    pub fn brake(label: &str, mu1: HalfInt) -> Self {
        OrbitRecord {
            label: label.into(),
            kind: OrbitKind::BrakeOrbit,
            mu1: Some(mu1),
            mu_cz: None,
            nullities: (0, 0, 0),
            multiplicity: 1,
            period: 1.0,
        }
    }

    pub fn pair(label: &str, mu_cz: i64) -> Self {
        OrbitRecord {
            label: label.into(),
            kind: OrbitKind::ReebPair,
            mu1: None,
            mu_cz: Some(HalfInt::from_int(mu_cz)),
            nullities: (0, 0, 0),
            multiplicity: 1,
            period: 1.0,
        }
    }

    /// The index entering the dimension formulas: `μ₁` or `μ_CZ`.
    pub fn index(&self) -> HalfInt {
        match self.kind {
            OrbitKind::BrakeOrbit => self.mu1.unwrap_or(HalfInt::ZERO),
            OrbitKind::ReebPair => self.mu_cz.unwrap_or(HalfInt::ZERO),
        }
    }

    /// Shape checks: the index field matching the kind, positive multiplicity
    /// and period, integral `μ_CZ`.
    pub fn check_shape(&self) -> Result<()> {
        let bad = |reason: &str| Err(Error::InvalidInput(format!("orbit '{}': {reason}", self.label)));
        match self.kind {
            OrbitKind::BrakeOrbit if self.mu1.is_none() || self.mu_cz.is_some() => {
                return bad("kind/index mismatch: a brake orbit carries mu1 only")
            }
            OrbitKind::ReebPair if self.mu_cz.is_none() || self.mu1.is_some() => {
                return bad("kind/index mismatch: a Reeb pair carries mu_cz only")
            }
            _ => {}
        }
        if let Some(cz) = self.mu_cz {
            if !cz.is_integer() {
                return bad("mu_cz must be an integer");
            }
        }
        if self.multiplicity == 0 {
            return bad("multiplicity must be positive");
        }
        if !(self.period > 0.0) || !self.period.is_finite() {
            return bad("period must be positive");
        }
        Ok(())
    }

    /// Nondegeneracy: `ν = 0`, and also `ν₁ = 0` for brake orbits.
    pub fn check_nondegenerate(&self) -> Result<()> {
        let (nu, nu1, _) = self.nullities;
        if nu != 0 {
            return Err(Error::DegenerateOrbit { label: self.label.clone(), reason: format!("nu = {nu}") });
        }
        if self.kind == OrbitKind::BrakeOrbit && nu1 != 0 {
            return Err(Error::DegenerateOrbit { label: self.label.clone(), reason: format!("nu1 = {nu1}") });
        }
        Ok(())
    }
}

/// Which list of a [`ModuliSpec`] an orbit sits in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum End {
    PositiveBrake,
    NegativeBrake,
    PositivePair,
    NegativePair,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModuliSpec {
    /// Half the dimension of the symplectization.
    pub n: usize,
    pub genus: u32,
    #[serde(default)]
    pub positive_brake: Vec<OrbitRecord>,
    #[serde(default)]
    pub negative_brake: Vec<OrbitRecord>,
    #[serde(default)]
    pub positive_pairs: Vec<OrbitRecord>,
    #[serde(default)]
    pub negative_pairs: Vec<OrbitRecord>,
    /// First Chern number of the chosen trivialization; 0 by default.
    #[serde(default)]
    pub c1: i64,
}

impl ModuliSpec {
    pub fn new(n: usize, genus: u32) -> Self {
        ModuliSpec {
            n,
            genus,
            positive_brake: Vec::new(),
            negative_brake: Vec::new(),
            positive_pairs: Vec::new(),
            negative_pairs: Vec::new(),
            c1: 0,
        }
    }

    pub fn list(&self, end: End) -> &[OrbitRecord] {
        match end {
            End::PositiveBrake => &self.positive_brake,
            End::NegativeBrake => &self.negative_brake,
            End::PositivePair => &self.positive_pairs,
            End::NegativePair => &self.negative_pairs,
        }
    }

    fn list_mut(&mut self, end: End) -> &mut Vec<OrbitRecord> {
        match end {
            End::PositiveBrake => &mut self.positive_brake,
            End::NegativeBrake => &mut self.negative_brake,
            End::PositivePair => &mut self.positive_pairs,
            End::NegativePair => &mut self.negative_pairs,
        }
    }

    /// `s = s⁺ + s⁻`.
    pub fn brake_punctures(&self) -> usize {
        self.positive_brake.len() + self.negative_brake.len()
    }

    /// `t = t⁺ + t⁻`.
    pub fn pair_punctures(&self) -> usize {
        self.positive_pairs.len() + self.negative_pairs.len()
    }

    /// `2 − 2g − s − 2t`.
    pub fn euler_term(&self) -> i64 {
        2 - 2 * self.genus as i64 - self.brake_punctures() as i64 - 2 * self.pair_punctures() as i64
    }

    /// Shape, list membership and nondegeneracy of every record.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidInput("n must be positive".into()));
        }
        for (end, kind) in [
            (End::PositiveBrake, OrbitKind::BrakeOrbit),
            (End::NegativeBrake, OrbitKind::BrakeOrbit),
            (End::PositivePair, OrbitKind::ReebPair),
            (End::NegativePair, OrbitKind::ReebPair),
        ] {
            for r in self.list(end) {
                r.check_shape()?;
                if r.kind != kind {
                    return Err(Error::InvalidInput(format!("orbit '{}' is in the wrong list for its kind", r.label)));
                }
                r.check_nondegenerate()?;
            }
        }
        Ok(())
    }

    /// `Σμ₁(q) − Σμ₁(q') + Σμ_CZ(p) − Σμ_CZ(p')`.
    pub fn index_sum(&self) -> HalfInt {
        let sum = |end| self.list(end).iter().map(OrbitRecord::index).sum::<HalfInt>();
        sum(End::PositiveBrake) - sum(End::NegativeBrake) + sum(End::PositivePair) - sum(End::NegativePair)
    }

    /// Changes the trivialization along one orbit by `k` turns: the orbit's
    /// index moves by `k` (brake) or `2k` (pair) and `c₁` compensates.
    pub fn retrivialized(&self, end: End, i: usize, k: i64) -> Result<Self> {
        let mut out = self.clone();
        let rec = out
            .list_mut(end)
            .get_mut(i)
            .ok_or_else(|| Error::InvalidInput(format!("no orbit {i} at that end")))?;
        let shift = match rec.kind {
            OrbitKind::BrakeOrbit => {
                let m = rec.mu1.get_or_insert(HalfInt::ZERO);
                *m += HalfInt::from_int(k);
                k
            }
            OrbitKind::ReebPair => {
                let m = rec.mu_cz.get_or_insert(HalfInt::ZERO);
                *m += HalfInt::from_int(2 * k);
                2 * k
            }
        };
        match end {
            End::PositiveBrake | End::PositivePair => out.c1 -= shift,
            End::NegativeBrake | End::NegativePair => out.c1 += shift,
        }
        Ok(out)
    }
}

/// `index D'_F = (n/2)(2 − 2g − s − 2t) + Σ± indices + ½(s + 2t) + c₁`.
pub fn fredholm_index(spec: &ModuliSpec) -> Result<HalfInt> {
    spec.validate()?;
    let punctures = spec.brake_punctures() as i64 + 2 * spec.pair_punctures() as i64;
    Ok(HalfInt::halves(spec.n as i64 * spec.euler_term())
        + spec.index_sum()
        + HalfInt::halves(punctures)
        + HalfInt::from_int(spec.c1))
}

/// `max(0, 3g + s + 2t − 3)`.
pub fn teichmuller_dim(genus: u32, s: usize, t: usize) -> i64 {
    (3 * genus as i64 + s as i64 + 2 * t as i64 - 3).max(0)
}

/// `max(0, 3 − 3g − s − 2t)`.
pub fn aut_dim(genus: u32, s: usize, t: usize) -> i64 {
    (3 - 3 * genus as i64 - s as i64 - 2 * t as i64).max(0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionReport {
    pub fredholm_index_df: HalfInt,
    pub teichmuller_dim: i64,
    pub aut_dim: i64,
    /// `fredholm + teichmüller − aut`.
    pub virtual_dim: HalfInt,
    /// `((n−3)/2)(2 − 2g − s − 2t) + Σ± indices + c₁`, computed independently.
    pub closed_formula: HalfInt,
    pub per_orbit_degrees: Vec<(String, HalfInt)>,
    /// Set when the virtual dimension is not an integer.
    pub half_integral: bool,
}

pub fn virtual_dimension(spec: &ModuliSpec) -> Result<DimensionReport> {
    let fredholm = fredholm_index(spec)?;
    let (s, t) = (spec.brake_punctures(), spec.pair_punctures());
    let teich = teichmuller_dim(spec.genus, s, t);
    let aut = aut_dim(spec.genus, s, t);
    let virtual_dim = fredholm + HalfInt::from_int(teich - aut);
    let closed = HalfInt::halves((spec.n as i64 - 3) * spec.euler_term()) + spec.index_sum() + HalfInt::from_int(spec.c1);
    debug_assert_eq!(closed, virtual_dim);
    let per_orbit_degrees = [End::PositiveBrake, End::NegativeBrake, End::PositivePair, End::NegativePair]
        .iter()
        .flat_map(|e| spec.list(*e))
        .map(|r| (r.label.clone(), degree(r, spec.n)))
        .collect();
    Ok(DimensionReport {
        fredholm_index_df: fredholm,
        teichmuller_dim: teich,
        aut_dim: aut,
        virtual_dim,
        closed_formula: closed,
        per_orbit_degrees,
        half_integral: !virtual_dim.is_integer(),
    })
}

/// `μ₁ + (n−3)/2` for brake orbits, `μ_CZ + n − 3` for pairs.
pub fn degree(record: &OrbitRecord, n: usize) -> HalfInt {
    let n = n as i64;
    match record.kind {
        OrbitKind::BrakeOrbit => record.index() + HalfInt::halves(n - 3),
        OrbitKind::ReebPair => record.index() + HalfInt::from_int(n - 3),
    }
}

/// `γ_m(t) = γ(t − jτ)·γ(τ)^j` on `[jτ, (j+1)τ]`, `j = 0..m`.
pub fn iterate_path<T: Real>(path: &SymplecticPath<T>, m: usize) -> Result<SymplecticPath<T>> {
    if m == 0 {
        return Err(Error::InvalidInput("iterate count must be positive".into()));
    }
    if !path.is_based() {
        return Err(Error::InvalidInput("iterating needs a path with γ(0) = I".into()));
    }
    let (a, b) = (path.start(), path.end());
    let tau = b - a;
    let end = path.last().clone();
    let dim = end.nrows();
    let mut power = Mat::identity(dim, dim);
    let mut times = Vec::new();
    let mut values = Vec::new();
    let mut generators = Vec::new();
    for j in 0..m {
        let inv = symplectic_inverse(&power);
        let offset = tau * T::from_usize_lossy(j);
        let skip = if j == 0 { 0 } else { 1 };
        for (t, v) in path.times().iter().zip(path.values()).skip(skip) {
            times.push(*t + offset);
            values.push(v * &power);
        }
        for g in path.generators() {
            generators.push(&inv * g * &power);
        }
        power = &power * &end;
    }
    Ok(SymplecticPath::from_parts(times, values, generators))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Good,
    Bad,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterateRow {
    pub m: usize,
    pub mu_cz: HalfInt,
    /// `|x^m| = μ_CZ + n − 3`.
    pub degree: HalfInt,
    /// `|x^m| mod 2`.
    pub parity: i64,
    pub verdict: Verdict,
}

/// Degrees and parities of the iterates `x, x², …, x^max_m`; an even
/// iterate is bad when its parity differs from that of `x`.
pub fn classify_good_bad<T: Real>(path: &SymplecticPath<T>, n: usize, max_m: usize, cfg: &Config) -> Result<Vec<IterateRow>> {
    let mut rows = Vec::with_capacity(max_m);
    let mut odd_parity = None;
    for m in 1..=max_m {
        let it = iterate_path(path, m)?;
        let nu = nullities(&it, cfg).nu;
        if nu > 0 {
            return Err(Error::DegenerateIterate { m, nullity: nu });
        }
        let mu_cz = cz_index(&it, cfg)?;
        let degree = mu_cz + HalfInt::from_int(n as i64 - 3);
        let parity = degree
            .parity()
            .ok_or_else(|| Error::InvalidInput(format!("iterate {m} has a non-integral index {mu_cz}")))?;
        let base = *odd_parity.get_or_insert(parity);
        let verdict = if m % 2 == 0 && parity != base { Verdict::Bad } else { Verdict::Good };
        rows.push(IterateRow { m, mu_cz, degree, parity, verdict });
    }
    Ok(rows)
}
