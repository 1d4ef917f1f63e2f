//! Exact mode counting for the model operator `∂̄ + β(s)ω` on caps with
//! brake symmetry, index ledgers for glued surfaces, and Riemann–Roch.
//!
//! In the coordinate `s = log r / 2π` a Fourier mode `A_k(s)e^{2πikt}` of a
//! kernel element solves `A_k' = (2πk − β(s)ω)A_k`, so it behaves like `r^k`
//! at the centre and like `r^{k − ω/2π}` on the end. Brake symmetry makes
//! the coefficients real, so each admissible `k` contributes one real
//! dimension per rank-one block.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::operator::smooth_step;
use crate::{Error, HalfInt, Result};

/// Whether the cap end is a positive or a negative puncture.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn opposite(self) -> Self {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapSpec {
    pub sign: Polarity,
    pub omega: f64,
    pub rank: usize,
}

impl CapSpec {
    pub fn new(sign: Polarity, omega: f64, rank: usize) -> Result<Self> {
        if rank == 0 || !omega.is_finite() {
            return Err(Error::InvalidInput("cap needs a positive rank and a finite omega".into()));
        }
        let ratio = omega / std::f64::consts::TAU;
        if (ratio - ratio.round()).abs() <= 1e-9 {
            return Err(Error::OmegaResonant { ratio });
        }
        Ok(CapSpec { sign, omega, rank })
    }

    /// `ω/2π` as seen from the positive side: a negative cap with weight `ω`
    /// is a positive cap with weight `−ω` after `s ↦ −s`.
    fn effective_ratio(&self) -> f64 {
        let r = self.omega / std::f64::consts::TAU;
        match self.sign {
            Polarity::Positive => r,
            Polarity::Negative => -r,
        }
    }
}

/// `(dim ker, dim coker)` of the cap operator.
///
/// Per block: `ker = #{k ∈ Z : 0 ≤ k < ω/2π}`, `coker = #{k ∈ Z : ω/2π < k ≤ −1}`.
/// The cokernel condition is taken from this set description; a scalar
/// condition of the form "ω > −1" would disagree with it and is not used.
pub fn cap_kernel_cokernel(spec: &CapSpec) -> Result<(usize, usize)> {
    let spec = CapSpec::new(spec.sign, spec.omega, spec.rank)?;
    let r = spec.effective_ratio();
    let ker = if r > 0.0 { r.ceil() as usize } else { 0 };
    let coker = if r < -1.0 { (-r).ceil() as usize - 1 } else { 0 };
    Ok((ker * spec.rank, coker * spec.rank))
}

/// `ker − coker` as a half-integer.
pub fn cap_fredholm_index(spec: &CapSpec) -> Result<HalfInt> {
    let (k, c) = cap_kernel_cokernel(spec)?;
    Ok(HalfInt::from_int(k as i64 - c as i64))
}

/// Index of a cap from its boundary index.
///
/// Brake-symmetric: `rank/2 ± μ₁`. Periodic pair (`is_pair`): `rank ± μ_CZ`.
pub fn cap_index(sign: Polarity, boundary_mu: HalfInt, rank: usize, is_pair: bool) -> HalfInt {
    let base = if is_pair { HalfInt::from_int(rank as i64) } else { HalfInt::halves(rank as i64) };
    match sign {
        Polarity::Positive => base + boundary_mu,
        Polarity::Negative => base - boundary_mu,
    }
}

/// `(n/2)(2 − 2g) + c₁`.
pub fn riemann_roch_brake(genus: u32, c1: i64, n: usize) -> HalfInt {
    HalfInt::halves(n as i64 * (2 - 2 * genus as i64)) + HalfInt::from_int(c1)
}

/// Symmetry class of a boundary operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryClass {
    /// Brake-symmetric end, labelled by `μ₁`.
    Symmetric,
    /// Periodic end, labelled by `μ_CZ`.
    Pair,
}

/// One end of a piece.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Boundary {
    pub label: String,
    pub polarity: Polarity,
    pub class: BoundaryClass,
    pub mu: HalfInt,
}

/// A surface piece with its Fredholm index and labelled ends.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub label: String,
    pub index: HalfInt,
    pub boundaries: Vec<Boundary>,
}

impl Piece {
    /// A brake-symmetric cap whose single end is `boundary`.
    pub fn cap(label: &str, sign: Polarity, boundary: &str, mu1: HalfInt, rank: usize) -> Self {
        Piece {
            label: label.into(),
            index: cap_index(sign, mu1, rank, false),
            boundaries: vec![Boundary { label: boundary.into(), polarity: sign, class: BoundaryClass::Symmetric, mu: mu1 }],
        }
    }

    /// A brake-symmetric cylinder from a negative end `(from, a)` to a
    /// positive end `(to, b)`; its index is `b − a`.
    pub fn cylinder(label: &str, from: &str, a: HalfInt, to: &str, b: HalfInt) -> Self {
        Piece {
            label: label.into(),
            index: b - a,
            boundaries: vec![
                Boundary { label: from.into(), polarity: Polarity::Negative, class: BoundaryClass::Symmetric, mu: a },
                Boundary { label: to.into(), polarity: Polarity::Positive, class: BoundaryClass::Symmetric, mu: b },
            ],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexLedger {
    pub pieces: Vec<(String, HalfInt)>,
    pub total: HalfInt,
    /// Ends left unmatched (ends of the glued surface).
    pub open_ends: Vec<Boundary>,
}

/// Glues pieces along equal boundary labels and sums their indices.
///
/// A label may occur at most twice; when it occurs twice the two ends must
/// have opposite polarity and identical class and index. Labels that occur
/// once stay open.
pub fn glue(pieces: &[Piece]) -> Result<IndexLedger> {
    let mut ends: BTreeMap<&str, Vec<&Boundary>> = BTreeMap::new();
    for p in pieces {
        for b in &p.boundaries {
            ends.entry(b.label.as_str()).or_default().push(b);
        }
    }
    let mut open_ends = Vec::new();
    for (label, list) in &ends {
        let mismatch = |reason: String| Error::BoundaryMismatch { label: (*label).to_string(), reason };
        match list.as_slice() {
            [single] => open_ends.push((*single).clone()),
            [a, b] => {
                if a.polarity != b.polarity.opposite() {
                    return Err(mismatch("both ends have the same polarity".into()));
                }
                if a.class != b.class {
                    return Err(mismatch("symmetric end glued to a periodic end".into()));
                }
                if a.mu != b.mu {
                    return Err(mismatch(format!("boundary indices differ ({} vs {})", a.mu, b.mu)));
                }
            }
            more => return Err(mismatch(format!("label occurs {} times", more.len()))),
        }
    }
    let list: Vec<(String, HalfInt)> = pieces.iter().map(|p| (p.label.clone(), p.index)).collect();
    let total = list.iter().map(|(_, i)| *i).sum();
    Ok(IndexLedger { pieces: list, total, open_ends })
}

/// Finite-difference cross-check of [`cap_kernel_cokernel`] for `ω = ±π`
/// (to within 1e-6).
///
/// For modes `|k| ≤ modes` the radial equations `A' = (2πk − βω)A` (kernel)
/// and `B' = −(2πk − βω)B` (cokernel) are integrated by the trapezoidal
/// rule on `s ∈ [0, 6]`, with `β` rising on `(2, 3)`. A mode counts when its
/// solution is regular at the centre (growth rate at `s = 0` nonnegative)
/// and decays along the end (discrete log-slope at `s = 6` negative).
pub fn cap_kernel_cokernel_slow(spec: &CapSpec, modes: i64, steps: usize) -> Result<(usize, usize)> {
    let spec = CapSpec::new(spec.sign, spec.omega, spec.rank)?;
    if (spec.omega.abs() - std::f64::consts::PI).abs() > 1e-6 {
        return Err(Error::InvalidInput("the finite-difference cap check supports omega = ±pi only".into()));
    }
    let omega = spec.effective_ratio() * std::f64::consts::TAU;
    let beta = |s: f64| smooth_step(s - 2.0);
    let (s0, s1) = (0.0, 6.0);
    let h = (s1 - s0) / steps as f64;
    let count = |sign: f64| -> usize {
        let mut n = 0;
        for k in -modes..=modes {
            let rate = |s: f64| sign * (std::f64::consts::TAU * k as f64 - beta(s) * omega);
            // regular at the centre: the mode must not blow up as s → −∞,
            // i.e. grow (or stay) going outwards, with equality excluded for
            // the adjoint (k ≤ −1)
            let centre = rate(s0);
            let regular = if sign > 0.0 { centre >= 0.0 } else { centre > 0.0 };
            if !regular {
                continue;
            }
            let mut log_a = 0.0;
            let mut last_slope = 0.0;
            for i in 0..steps {
                let (a, b) = (s0 + h * i as f64, s0 + h * (i + 1) as f64);
                let step = 0.5 * h * (rate(a) + rate(b));
                log_a += step;
                last_slope = step / h;
            }
            if log_a.is_finite() && last_slope < 0.0 {
                n += 1;
            }
        }
        n
    };
    Ok((count(1.0) * spec.rank, count(-1.0) * spec.rank))
}
