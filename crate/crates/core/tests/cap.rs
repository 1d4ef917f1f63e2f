use std::f64::consts::PI;

use bit_core::cap::{
    cap_fredholm_index, cap_index, cap_kernel_cokernel, cap_kernel_cokernel_slow, glue, riemann_roch_brake, CapSpec,
    Piece, Polarity,
};
use bit_core::index::brake_mu;
use bit_core::symplectic::rotation_path;
use bit_core::{Config, Error, HalfInt};
use proptest::prelude::*;

fn h(doubled: i64) -> HalfInt {
    HalfInt::from_doubled(doubled)
}

#[test]
fn kernel_cokernel_examples() {
    let cap = |w: f64| CapSpec::new(Polarity::Positive, w, 1).unwrap();
    assert_eq!(cap_kernel_cokernel(&cap(PI)).unwrap(), (1, 0));
    assert_eq!(cap_kernel_cokernel(&cap(-PI)).unwrap(), (0, 0));
    assert_eq!(cap_kernel_cokernel(&cap(5.0 * PI)).unwrap(), (3, 0));
    assert_eq!(cap_kernel_cokernel(&cap(-5.0 * PI)).unwrap(), (0, 2));
    assert_eq!(cap_fredholm_index(&cap(5.0 * PI)).unwrap(), HalfInt::from_int(3));
    let wide = CapSpec::new(Polarity::Positive, 3.0 * PI, 4).unwrap();
    assert_eq!(cap_kernel_cokernel(&wide).unwrap(), (8, 0));
}

#[test]
fn resonant_omega_rejected() {
    assert!(matches!(CapSpec::new(Polarity::Positive, 4.0 * PI, 1), Err(Error::OmegaResonant { .. })));
    assert!(matches!(CapSpec::new(Polarity::Negative, 0.0, 1), Err(Error::OmegaResonant { .. })));
}

#[test]
fn cap_index_examples() {
    assert_eq!(cap_index(Polarity::Positive, h(1), 1, false), HalfInt::from_int(1));
    assert_eq!(cap_index(Polarity::Negative, h(1), 1, false), HalfInt::ZERO);
    assert_eq!(cap_index(Polarity::Positive, HalfInt::from_int(3), 2, true), HalfInt::from_int(5));
    assert_eq!(cap_index(Polarity::Negative, HalfInt::from_int(3), 2, true), HalfInt::from_int(-1));
}

#[test]
fn sphere_from_two_caps() {
    let l = glue(&[
        Piece::cap("D+", Polarity::Positive, "e", h(1), 1),
        Piece::cap("D-", Polarity::Negative, "e", h(1), 1),
    ])
    .unwrap();
    assert_eq!(l.total, HalfInt::from_int(1));
    assert!(l.open_ends.is_empty());
    assert_eq!(l.total, riemann_roch_brake(0, 0, 1));
}

#[test]
fn gluing_errors_and_identity() {
    let single = glue(&[Piece::cap("D+", Polarity::Positive, "e", h(3), 1)]).unwrap();
    assert_eq!(single.total, h(4));
    assert_eq!(single.open_ends.len(), 1);
    let same_polarity = glue(&[
        Piece::cap("a", Polarity::Positive, "e", h(1), 1),
        Piece::cap("b", Polarity::Positive, "e", h(1), 1),
    ]);
    assert!(matches!(same_polarity, Err(Error::BoundaryMismatch { .. })));
    let different_mu = glue(&[
        Piece::cap("a", Polarity::Positive, "e", h(1), 1),
        Piece::cap("b", Polarity::Negative, "e", h(3), 1),
    ]);
    assert!(matches!(different_mu, Err(Error::BoundaryMismatch { .. })));
    let triple = glue(&[
        Piece::cap("a", Polarity::Positive, "e", h(1), 1),
        Piece::cap("b", Polarity::Negative, "e", h(1), 1),
        Piece::cap("c", Polarity::Negative, "e", h(1), 1),
    ]);
    assert!(matches!(triple, Err(Error::BoundaryMismatch { .. })));
}

#[test]
fn riemann_roch_examples() {
    assert_eq!(riemann_roch_brake(0, 0, 1), HalfInt::from_int(1));
    assert_eq!(riemann_roch_brake(1, 0, 2), HalfInt::ZERO);
    assert_eq!(riemann_roch_brake(0, 3, 1), HalfInt::from_int(4));
    assert_eq!(riemann_roch_brake(2, 0, 1), HalfInt::from_int(-1));
}

#[test]
fn slow_oracle_agrees_at_pi() {
    for sign in [Polarity::Positive, Polarity::Negative] {
        for w in [PI, -PI] {
            let spec = CapSpec::new(sign, w, 2).unwrap();
            assert_eq!(cap_kernel_cokernel_slow(&spec, 6, 600).unwrap(), cap_kernel_cokernel(&spec).unwrap());
        }
    }
    let spec = CapSpec::new(Polarity::Positive, 3.0 * PI, 1).unwrap();
    assert!(cap_kernel_cokernel_slow(&spec, 6, 600).is_err());
}

#[test]
fn negative_omega_against_crossing_forms() {
    let cfg = Config::default();
    for w in [-PI, -3.0 * PI, -5.5 * PI, -0.3 * PI] {
        let spec = CapSpec::new(Polarity::Positive, w, 1).unwrap();
        let mu1 = brake_mu(&rotation_path(w, 1, (0.0, 1.0), 257).unwrap(), 1, &cfg).unwrap();
        assert_eq!(cap_fredholm_index(&spec).unwrap(), h(1) + mu1, "omega = {w}");
    }
}

proptest! {
    #[test]
    fn positive_omega_floor_law(r in 0.01f64..6.0) {
        prop_assume!((r - r.round()).abs() > 1e-6);
        let spec = CapSpec::new(Polarity::Positive, r * 2.0 * PI, 1).unwrap();
        let mu1 = h(1) + HalfInt::from_int(r.floor() as i64);
        prop_assert_eq!(cap_fredholm_index(&spec).unwrap(), h(1) + mu1);
    }

    #[test]
    fn kernel_and_cokernel_never_both(r in -6.0f64..6.0, rank in 1usize..4, neg in any::<bool>()) {
        prop_assume!((r - r.round()).abs() > 1e-6);
        let sign = if neg { Polarity::Negative } else { Polarity::Positive };
        let (k, c) = cap_kernel_cokernel(&CapSpec::new(sign, r * 2.0 * PI, rank).unwrap()).unwrap();
        prop_assert!(k == 0 || c == 0);
        prop_assert_eq!(k % rank, 0);
    }

    #[test]
    fn opposite_caps_make_a_sphere(d in -40i64..40, n in 1usize..5, rot in 0usize..3) {
        let mu = h(2 * d + 1);
        let mut pieces = vec![
            Piece::cap("p", Polarity::Positive, "e", mu, n),
            Piece::cap("q", Polarity::Negative, "e", mu, n),
        ];
        pieces.rotate_left(rot % 2);
        prop_assert_eq!(glue(&pieces).unwrap().total, riemann_roch_brake(0, 0, n));
    }

    #[test]
    fn cap_cylinder_cap(a in -20i64..20, b in -20i64..20, order in 0usize..6) {
        let (ma, mb) = (h(2 * a + 1), h(2 * b + 1));
        let mut pieces = vec![
            Piece::cap("D+", Polarity::Positive, "x", ma, 1),
            Piece::cylinder("Z", "x", ma, "y", mb),
            Piece::cap("D-", Polarity::Negative, "y", mb, 1),
        ];
        pieces.rotate_left(order % 3);
        if order >= 3 {
            pieces.swap(0, 1);
        }
        prop_assert_eq!(glue(&pieces).unwrap().total, HalfInt::from_int(1));
    }
}
