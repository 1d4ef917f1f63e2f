//! A fast, deterministic run of the library's invariants, for installs and
//! the `selfcheck` command.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cap::{cap_fredholm_index, glue, riemann_roch_brake, CapSpec, Piece, Polarity};
use crate::hamiltonian::{find_brake_orbit, harmonic, linearized_path};
use crate::index::{brake_mu, cz_index, loop_shift_cz, loop_shift_mu1, nullities};
use crate::linalg::{expm, j0, n0, Mat, Vector};
use crate::moduli::{classify_good_bad, virtual_dimension, ModuliSpec, OrbitRecord, Verdict};
use crate::operator::{kernel_dimension, spectral_flow, AsymptoticOperator, Domain, OperatorFamily, SymmetricLoop};
use crate::symplectic::{fundamental_solution, loop_degree, rotation_path, SymplecticPath, UnitaryLoop};
use crate::{Config, HalfInt, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn record(name: &str, outcome: Result<std::result::Result<String, String>>) -> CheckResult {
    let (passed, detail) = match outcome {
        Ok(Ok(d)) => (true, d),
        Ok(Err(d)) => (false, d),
        Err(e) => (false, format!("{}: {e}", e.name())),
    };
    CheckResult { name: name.into(), passed, detail }
}

fn half(doubled: i64) -> HalfInt {
    HalfInt::from_doubled(doubled)
}

/// Runs every check; never panics on numerical failure.
pub fn run(cfg: &Config) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    vec![
        record("rotation_brake_table", rotation_table(cfg)),
        record("cap_vs_crossing_forms", cap_vs_crossing(cfg, &mut rng)),
        record("glued_sphere", glued_sphere(&mut rng)),
        record("spectral_flow_law", flow_law(cfg)),
        record("kernel_characterization", kernels(cfg)),
        record("loop_shifts", loop_shifts(cfg)),
        record("brake_nullity_sum", nullity_sum(cfg, &mut rng)),
        record("dimension_routes", dimension_routes(&mut rng)),
        record("harmonic_brake_orbit", harmonic_pipeline(cfg)),
        record("good_bad_iterates", good_bad(cfg)),
    ]
}

type Check = Result<std::result::Result<String, String>>;

fn rotation_table(cfg: &Config) -> Check {
    for k in 0..4 {
        let omega = (2 * k + 1) as f64 * PI;
        let p = rotation_path(omega, 1, (0.0, 1.0), 2048)?;
        let mu = brake_mu(&p, 1, cfg)?;
        if mu != half(2 * k + 1) {
            return Ok(Err(format!("mu1 at {}pi is {mu}", 2 * k + 1)));
        }
    }
    Ok(Ok("1/2, 3/2, 5/2, 7/2".into()))
}

fn cap_vs_crossing(cfg: &Config, rng: &mut ChaCha8Rng) -> Check {
    let mut done = 0;
    while done < 8 {
        let omega: f64 = rng.gen_range(-4.0 * PI..4.0 * PI);
        let r = omega / (2.0 * PI);
        if (r - r.round()).abs() <= 0.05 {
            continue;
        }
        let index = cap_fredholm_index(&CapSpec::new(Polarity::Positive, omega, 1)?)?;
        let mu1 = brake_mu(&rotation_path(omega, 1, (0.0, 1.0), 513)?, 1, cfg)?;
        if index != half(1) + mu1 {
            return Ok(Err(format!("omega {omega}: ker-coker {index}, 1/2 + mu1 = {}", half(1) + mu1)));
        }
        done += 1;
    }
    Ok(Ok(format!("{done} random omegas")))
}

fn glued_sphere(rng: &mut ChaCha8Rng) -> Check {
    for _ in 0..10 {
        let a = half(2 * rng.gen_range(-6i64..6) + 1);
        let b = half(2 * rng.gen_range(-6i64..6) + 1);
        let l = glue(&[
            Piece::cap("D+", Polarity::Positive, "x", a, 1),
            Piece::cylinder("Z", "x", a, "y", b),
            Piece::cap("D-", Polarity::Negative, "y", b, 1),
        ])?;
        if l.total != riemann_roch_brake(0, 0, 1) {
            return Ok(Err(format!("total {} for {a} -> {b}", l.total)));
        }
    }
    Ok(Ok("10 ledgers total 1".into()))
}

fn flow_law(cfg: &Config) -> Check {
    for (a, b) in [(PI, 3.0 * PI), (3.0 * PI, -PI)] {
        let pa = rotation_path(a, 1, (0.0, 1.0), 257)?;
        let pb = rotation_path(b, 1, (0.0, 1.0), 257)?;
        let brake = OperatorFamily::interpolating_multiples(1, 1.0, Domain::BrakeSymmetric, a, b, 16)?;
        let full = OperatorFamily::interpolating_multiples(1, 1.0, Domain::Full, a, b, 16)?;
        let sf_b = spectral_flow(&brake, 16, cfg)?.value;
        let sf_f = spectral_flow(&full, 16, cfg)?.value;
        let mu = brake_mu(&pb, 1, cfg)? - brake_mu(&pa, 1, cfg)?;
        let cz = cz_index(&pb, cfg)? - cz_index(&pa, cfg)?;
        if HalfInt::from_int(sf_b) != mu || HalfInt::from_int(sf_f) != cz {
            return Ok(Err(format!("flow ({sf_b}, {sf_f}) vs index differences ({mu}, {cz})")));
        }
    }
    Ok(Ok("brake and full families".into()))
}

fn kernels(cfg: &Config) -> Check {
    let loose = Config { tol_rank: 1e-6, ..cfg.clone() };
    for (c, b) in [(2.0 * PI, 0.0), (2.0 * PI, 0.7), (3.0 * PI, 0.4), (4.0 * PI, -0.5)] {
        let l = SymmetricLoop::new(1, 1.0, true, 1e-9, move |t: f64| Mat::identity(2, 2) * (c + b * (2.0 * PI * t).cos()))?;
        let lc = l.clone();
        let gamma = fundamental_solution(move |t| lc.eval(t), 1.0, 2048, cfg)?;
        let nu = nullities(&gamma, &loose);
        let full = kernel_dimension(&AsymptoticOperator::new(l.clone(), Domain::Full)?, 16, cfg)?;
        let brake = kernel_dimension(&AsymptoticOperator::new(l, Domain::BrakeSymmetric)?, 16, cfg)?;
        if full != nu.nu || brake != nu.nu1 {
            return Ok(Err(format!("kernels ({full}, {brake}) vs nullities ({}, {})", nu.nu, nu.nu1)));
        }
    }
    Ok(Ok("4 loops".into()))
}

fn loop_shifts(cfg: &Config) -> Check {
    for w in [PI, 3.0 * PI] {
        let p = rotation_path(w, 1, (0.0, 1.0), 129)?;
        let cz = cz_index(&p, cfg)?;
        let mu = brake_mu(&p, 1, cfg)?;
        for k in -2..=2i64 {
            let phi = UnitaryLoop::circle(k, 1, 1.0, 129)?;
            let deg = loop_degree(&phi)?;
            if loop_shift_cz(&phi, &p, cfg)? != cz + HalfInt::from_int(2 * deg)
                || loop_shift_mu1(&phi, &p, cfg)? != mu + HalfInt::from_int(deg)
            {
                return Ok(Err(format!("shift identity fails for k = {k}, omega = {w}")));
            }
        }
    }
    Ok(Ok("k in -2..=2".into()))
}

/// A brake-symmetric block system with known nullities.
pub fn block_system(kinds: &[u8], seed: u64) -> (impl Fn(f64) -> Mat<f64> + Clone, (usize, usize, usize)) {
    let n = kinds.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params: Vec<(f64, f64)> = kinds.iter().map(|_| (rng.gen_range(0.3..1.5), rng.gen_range(-0.8..0.8))).collect();
    // constant conjugation by diag(A, A⁻ᵀ) keeps L₁, L₂ and the brake symmetry
    let a = Mat::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 } + rng.gen_range(-0.3..0.3));
    let a_inv_t = a.clone().try_inverse().expect("near-identity matrix").transpose();
    let mut p = Mat::zeros(2 * n, 2 * n);
    p.view_mut((0, 0), (n, n)).copy_from(&a);
    p.view_mut((n, n), (n, n)).copy_from(&a_inv_t);
    let p_inv = p.clone().try_inverse().expect("block-diagonal inverse");
    let mut expected = (0, 0, 0);
    for k in kinds {
        let add = match k {
            0 => (0, 0, 0),
            1 => (2, 1, 1),
            2 => (1, 1, 0),
            _ => (1, 0, 1),
        };
        expected = (expected.0 + add.0, expected.1 + add.1, expected.2 + add.2);
    }
    let kinds = kinds.to_vec();
    let b = move |t: f64| {
        let mut s = Mat::zeros(2 * n, 2 * n);
        for (i, (k, (amp, wobble))) in kinds.iter().zip(&params).enumerate() {
            let c = wobble * (2.0 * PI * t).cos();
            let (bp, bq) = match k {
                // rotation with mean 2π + ½: no intersections
                0 => (2.0 * PI + 0.5 + c, 2.0 * PI + 0.5 + c),
                // rotation with mean 2π: Φ(½) = −I, Φ(1) = I
                1 => (2.0 * PI + c, 2.0 * PI + c),
                // shears fixing L₁ or L₂
                2 => (*amp, 0.0),
                _ => (0.0, *amp),
            };
            s[(i, i)] = bp;
            s[(n + i, n + i)] = bq;
        }
        p_inv.transpose() * s * &p_inv
    };
    (b, expected)
}

fn nullity_sum(cfg: &Config, rng: &mut ChaCha8Rng) -> Check {
    let loose = Config { tol_rank: 1e-6, ..cfg.clone() };
    for trial in 0..10 {
        let kinds: Vec<u8> = (0..rng.gen_range(1..3)).map(|_| rng.gen_range(0..4)).collect();
        let (b, expected) = block_system(&kinds, trial);
        let gamma = fundamental_solution(b, 1.0, 1024, cfg)?;
        let nu = nullities(&gamma, &loose);
        if (nu.nu, nu.nu1, nu.nu2) != expected || nu.nu1 + nu.nu2 != nu.nu {
            return Ok(Err(format!("kinds {kinds:?}: got {:?}, expected {expected:?}", (nu.nu, nu.nu1, nu.nu2))));
        }
        let mid = gamma.eval(0.5);
        let nn = n0::<f64>(gamma.n());
        let rebuilt = &nn * crate::symplectic::symplectic_inverse(&mid) * &nn * &mid;
        let err = (gamma.last() - rebuilt).abs().max();
        if err > 1e-6 {
            return Ok(Err(format!("half-period identity off by {err:.2e}")));
        }
    }
    Ok(Ok("10 systems".into()))
}

fn dimension_routes(rng: &mut ChaCha8Rng) -> Check {
    for _ in 0..50 {
        let n = rng.gen_range(1..7usize);
        let mut s = ModuliSpec::new(n, rng.gen_range(0..3));
        let mu1 = |rng: &mut ChaCha8Rng| HalfInt::halves(n as i64 - 1) + HalfInt::from_int(rng.gen_range(-5..5));
        for i in 0..rng.gen_range(0..4) {
            s.positive_brake.push(OrbitRecord::brake(&format!("q{i}"), mu1(rng)));
        }
        for i in 0..rng.gen_range(0..4) {
            s.negative_brake.push(OrbitRecord::brake(&format!("r{i}"), mu1(rng)));
        }
        for i in 0..rng.gen_range(0..3) {
            s.positive_pairs.push(OrbitRecord::pair(&format!("p{i}"), rng.gen_range(-5..5)));
        }
        for i in 0..rng.gen_range(0..3) {
            s.negative_pairs.push(OrbitRecord::pair(&format!("o{i}"), rng.gen_range(-5..5)));
        }
        let r = virtual_dimension(&s)?;
        if r.virtual_dim != r.closed_formula || r.half_integral {
            return Ok(Err(format!("routes disagree: {} vs {}", r.virtual_dim, r.closed_formula)));
        }
    }
    Ok(Ok("50 specs".into()))
}

fn harmonic_pipeline(cfg: &Config) -> Check {
    let h = harmonic::<f64>(1);
    let guess = Vector::from_column_slice(&[0.0, 1.05]);
    let b = find_brake_orbit(&h, &guess, 0.5, 6.0, cfg)?;
    let gamma = linearized_path(&h, &b.orbit, cfg)?;
    let nu = nullities(&gamma, &Config { tol_rank: 1e-6, ..cfg.clone() });
    let ok = (b.period - 2.0 * PI).abs() < 1e-6 && b.orbit.brake_residual() < 1e-7 && nu.nu1 == 1;
    let detail = format!("tau {:.9}, nu1 {}", b.period, nu.nu1);
    Ok(if ok { Ok(detail) } else { Err(detail) })
}

fn good_bad(cfg: &Config) -> Check {
    let elliptic = rotation_path(1.01 * PI, 1, (0.0, 1.0), 129)?;
    let rows = classify_good_bad(&elliptic, 3, 4, cfg)?;
    if rows.iter().any(|r| r.verdict != Verdict::Good) {
        return Ok(Err("elliptic iterate marked bad".into()));
    }
    let times: Vec<f64> = (0..=64).map(|k| k as f64 / 64.0).collect();
    let hyper = SymplecticPath::from_fn(
        times,
        |t| expm(&(j0::<f64>(1) * (PI * t))) * Mat::from_diagonal(&Vector::from_column_slice(&[2f64.powf(t), 2f64.powf(-t)])),
        cfg.tol_symplectic,
    )?;
    let rows = classify_good_bad(&hyper, 3, 4, cfg)?;
    let ok = rows.iter().all(|r| (r.verdict == Verdict::Bad) == (r.m % 2 == 0));
    Ok(if ok { Ok("elliptic good, negative hyperbolic even iterates bad".into()) } else { Err("wrong verdicts".into()) })
}
