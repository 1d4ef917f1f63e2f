use std::f64::consts::PI;

use bit_core::index::{brake_mu, cz_index, nullities};
use bit_core::linalg::Mat;
use bit_core::operator::{
    cylinder_index, discretize, kernel_dimension, spectral_flow, AsymptoticOperator, Domain, OperatorFamily,
    SymmetricLoop,
};
use bit_core::symplectic::{fundamental_solution, rotation_path};
use bit_core::{Config, Error, HalfInt};
use proptest::prelude::*;

fn constant(c: f64, domain: Domain) -> AsymptoticOperator<f64> {
    AsymptoticOperator::new(SymmetricLoop::constant_multiple(1, c, 1.0), domain).unwrap()
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

#[test]
fn free_spectrum() {
    let k = 6;
    let spec = discretize(&constant(0.0, Domain::Full), k).unwrap();
    let expected = sorted((-(k as i64)..=k as i64).flat_map(|j| [2.0 * PI * j as f64; 2]).collect());
    assert_eq!(spec.eigenvalues.len(), expected.len());
    for (a, b) in spec.eigenvalues.iter().zip(&expected) {
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }
}

#[test]
fn shifted_spectrum() {
    let k = 6;
    let spec = discretize(&constant(PI, Domain::Full), k).unwrap();
    let expected = sorted((-(k as i64)..=k as i64).flat_map(|j| [2.0 * PI * j as f64 - PI; 2]).collect());
    for (a, b) in spec.eigenvalues.iter().zip(&expected) {
        assert!((a - b).abs() < 1e-9);
    }
    assert!(spec.eigenvalues.iter().all(|x| x.abs() > 1.0));
}

#[test]
fn kernel_examples() {
    let cfg = Config::default();
    assert_eq!(kernel_dimension(&constant(2.0 * PI, Domain::Full), 32, &cfg).unwrap(), 2);
    assert_eq!(kernel_dimension(&constant(2.0 * PI, Domain::BrakeSymmetric), 32, &cfg).unwrap(), 1);
    assert_eq!(kernel_dimension(&constant(PI, Domain::Full), 32, &cfg).unwrap(), 0);
    assert_eq!(kernel_dimension(&constant(PI, Domain::BrakeSymmetric), 32, &cfg).unwrap(), 0);
}

#[test]
fn brake_domain_needs_brake_loop() {
    let l = SymmetricLoop::new(1, 1.0, false, 1e-9, |_t: f64| Mat::identity(2, 2)).unwrap();
    assert!(AsymptoticOperator::new(l, Domain::BrakeSymmetric).is_err());
    let skew = SymmetricLoop::new(1, 1.0, true, 1e-9, |t: f64| {
        Mat::from_row_slice(2, 2, &[1.0, (2.0 * PI * t).cos(), (2.0 * PI * t).cos(), 1.0])
    });
    assert!(matches!(skew, Err(Error::SymmetryViolated { .. })));
    let nonsym = SymmetricLoop::new(1, 1.0, false, 1e-9, |_t: f64| Mat::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]));
    assert!(nonsym.is_err());
}

#[test]
fn small_truncation_rejected() {
    assert!(discretize(&constant(PI, Domain::Full), 3).is_err());
}

#[test]
fn rough_loop_is_unstable() {
    // a square wave: Galerkin eigenvalues keep moving as K doubles
    let l = SymmetricLoop::new(1, 1.0, false, 1e-9, |t: f64| {
        let c = if (t % 1.0) < 0.5 { 30.0 } else { -20.0 };
        Mat::identity(2, 2) * c
    })
    .unwrap();
    let op = AsymptoticOperator::new(l, Domain::Full).unwrap();
    assert!(matches!(discretize(&op, 4), Err(Error::TruncationUnstable { .. })));
}

#[test]
fn spectral_flow_examples() {
    let cfg = Config::default();
    let flat = OperatorFamily::interpolating_multiples(1, 1.0, Domain::Full, PI, PI, 16).unwrap();
    assert_eq!(spectral_flow(&flat, 32, &cfg).unwrap().value, 0);
    for (domain, expected) in [(Domain::BrakeSymmetric, 1), (Domain::Full, 2)] {
        let f = OperatorFamily::interpolating_multiples(1, 1.0, domain, PI, 3.0 * PI, 64).unwrap();
        let r = spectral_flow(&f, 32, &cfg).unwrap();
        assert_eq!(r.value, expected);
        assert_eq!(r.crossings.iter().map(|c| c.net).sum::<i64>(), expected);
        assert!(r.crossings.iter().all(|c| (c.s_hi - c.s_lo).abs() <= 1e-6));
        assert_eq!(cylinder_index(&f, 32, &cfg).unwrap(), HalfInt::from_int(expected));
        assert_eq!(spectral_flow(&f.reversed(), 32, &cfg).unwrap().value, -expected);
    }
}

#[test]
fn degenerate_endpoint() {
    let f = OperatorFamily::interpolating_multiples(1, 1.0, Domain::Full, PI, 2.0 * PI, 16).unwrap();
    assert!(matches!(spectral_flow(&f, 16, &Config::default()), Err(Error::EndpointDegenerate { kernel: 2, .. })));
}

#[test]
fn flow_matches_index_differences() {
    let cfg = Config::default();
    for (a, b) in [(PI, 5.0 * PI), (-PI, 3.0 * PI), (5.0 * PI, -3.0 * PI)] {
        let pa = rotation_path(a, 1, (0.0, 1.0), 257).unwrap();
        let pb = rotation_path(b, 1, (0.0, 1.0), 257).unwrap();
        let full = OperatorFamily::interpolating_multiples(1, 1.0, Domain::Full, a, b, 32).unwrap();
        let brake = OperatorFamily::interpolating_multiples(1, 1.0, Domain::BrakeSymmetric, a, b, 32).unwrap();
        let cz = cz_index(&pb, &cfg).unwrap() - cz_index(&pa, &cfg).unwrap();
        let mu = brake_mu(&pb, 1, &cfg).unwrap() - brake_mu(&pa, 1, &cfg).unwrap();
        assert_eq!(cylinder_index(&full, 16, &cfg).unwrap(), cz);
        assert_eq!(cylinder_index(&brake, 16, &cfg).unwrap(), mu);
        assert!(mu.is_integer());
    }
}

#[test]
fn concatenation_adds() {
    let cfg = Config::default();
    let f = OperatorFamily::interpolating_multiples(1, 1.0, Domain::Full, PI, 3.0 * PI, 16).unwrap();
    let g = OperatorFamily::interpolating_multiples(1, 1.0, Domain::Full, 3.0 * PI, -PI, 16).unwrap();
    let fg = f.concatenated(&g).unwrap();
    let sf = |x: &OperatorFamily<f64>| spectral_flow(x, 16, &cfg).unwrap().value;
    assert_eq!(sf(&fg), sf(&f) + sf(&g));
    assert_eq!(sf(&fg), -2);
}

/// Brake-symmetric loop `S = [[a + b cos, e sin], [e sin, c + d cos]]` (`2πt`),
/// shifted by `shift·I`.
fn brake_loop(p: [f64; 5], shift: f64) -> SymmetricLoop<f64> {
    let [a, b, c, d, e] = p;
    SymmetricLoop::new(1, 1.0, true, 1e-9, move |t: f64| {
        let (s, co) = (2.0 * PI * t).sin_cos();
        Mat::from_row_slice(2, 2, &[shift + a + b * co, e * s, e * s, shift + c + d * co])
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn kernel_matches_ode_nullity(p in prop::array::uniform5(-1.5f64..1.5), m in 1usize..3, degenerate in any::<bool>()) {
        let cfg = Config::default();
        // S = c(t)·I with mean 2πm has Φ(1) = I and Φ(½) = ±I
        let (params, shift) = if degenerate {
            ([0.0, p[1], 0.0, p[1], 0.0], 2.0 * PI * m as f64)
        } else {
            (p, 2.0 * PI * m as f64 + PI)
        };
        let l = brake_loop(params, shift);
        let oracle = {
            let l = l.clone();
            fundamental_solution(move |t: f64| l.eval(t), 1.0, 4096, &cfg).unwrap()
        };
        let nu = nullities(&oracle, &Config { tol_rank: 1e-6, ..cfg.clone() });
        let full = kernel_dimension(&AsymptoticOperator::new(l.clone(), Domain::Full).unwrap(), 32, &cfg).unwrap();
        let brake = kernel_dimension(&AsymptoticOperator::new(l, Domain::BrakeSymmetric).unwrap(), 32, &cfg).unwrap();
        prop_assert_eq!(full, nu.nu);
        prop_assert_eq!(brake, nu.nu1);
        if degenerate {
            prop_assert_eq!((full, brake), (2, 1));
        }
    }
}
