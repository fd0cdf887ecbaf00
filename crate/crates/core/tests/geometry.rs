//! Cross-module geometric identities on random data.

use biharmonic_core::constructors::{self, DEFAULT_CURVE_LENGTH};
use biharmonic_core::diff;
use biharmonic_core::models::SpaceFormModel;
use biharmonic_core::{bitension, curves, tolerances::Tolerances};
use nalgebra::DVector;

fn models() -> Vec<SpaceFormModel> {
    vec![
        SpaceFormModel::unit_sphere(2).unwrap(),
        SpaceFormModel::flat(2).unwrap(),
        SpaceFormModel::deformed_sphere(0.5, 2).unwrap(),
        SpaceFormModel::deformed_sphere(4.0, 2).unwrap(),
    ]
}

/// `d/ds g(X, Y) = g(∇_T X, Y) + g(X, ∇_T Y)` for `X = ∇_T T` and `Y = φT`.
#[test]
fn metric_compatibility_along_random_curves() {
    for m in models() {
        let (c, _) = constructors::random_legendre_curve(&m, 5, DEFAULT_CURVE_LENGTH).unwrap();
        let s = c.samples();
        let t = s.velocity().unwrap();
        let x = s.covariant_derivative(&t, &t).unwrap();
        let y = t.map_indexed(|k, v| m.phi_at(&s.points[k], v));
        let dx = s.covariant_derivative(&t, &x).unwrap();
        let dy = s.covariant_derivative(&t, &y).unwrap();
        let gxy = x.map_indexed(|k, v| m.g_at(&s.points[k], v, y.at(k)));
        let dg = diff::derivative(&gxy, s.h, diff::DEFAULT_RICHARDSON_LEVELS).unwrap();
        let mut worst: f64 = 0.0;
        for k in s.interior() {
            let p = &s.points[k];
            let rhs = m.g_at(p, dx.at(k), y.at(k)) + m.g_at(p, x.at(k), dy.at(k));
            worst = worst.max((dg.at(k) - rhs).abs());
        }
        assert!(worst < 1e-6, "{}: {worst:e}", m.name());
    }
}

#[test]
fn random_curves_are_reproducible_and_legendre() {
    for m in models() {
        let (a, pa) = constructors::random_legendre_curve(&m, 17, DEFAULT_CURVE_LENGTH).unwrap();
        let (b, pb) = constructors::random_legendre_curve(&m, 17, DEFAULT_CURVE_LENGTH).unwrap();
        assert_eq!(pa, pb);
        let (sa, sb) = (a.samples(), b.samples());
        assert!(sa.points.iter().zip(&sb.points).all(|(x, y)| x == y));
        assert!(curves::legendre_residual(&a).unwrap() < 1e-8, "{}", m.name());
    }
}

#[test]
fn random_curves_are_not_biharmonic_and_evaluators_agree() {
    for m in models() {
        for seed in 0..3 {
            let (c, _) = constructors::random_legendre_curve(&m, seed, DEFAULT_CURVE_LENGTH).unwrap();
            let r = bitension::verdict(&c, Tolerances::default()).unwrap();
            assert_eq!(r.verdict, bitension::BiharmonicVerdict::NotBiharmonic);
            assert!(r.evaluator_gap_max < 1e-5, "{} seed {seed}: {:e}", m.name(), r.evaluator_gap_max);
        }
    }
}

#[test]
fn frenet_ode_round_trip_in_deformed_sphere() {
    let m = SpaceFormModel::for_c(5.0, 2).unwrap();
    let curve = constructors::case3_curve(5.0, 2, 2.0, 1, DEFAULT_CURVE_LENGTH).unwrap();
    assert_eq!(*curve.model(), m);
    let fd = curves::frenet(&curve, curves::DEFAULT_TOL_ORDER).unwrap();
    assert_eq!(fd.order, 3);
    let k = fd.interior.start;
    let frame = constructors::InitialFrame {
        point: fd.points[k].clone(),
        vectors: fd.frames.iter().map(|e| e.at(k).clone()).collect::<Vec<DVector<f64>>>(),
    };
    let kappas: Vec<f64> = (1..fd.order).map(|i| fd.curvature_stats(i).unwrap().0).collect();
    let again = constructors::integrate_frenet_ode(&m, &frame, &kappas, 4.0).unwrap();
    let orig = curve.samples();
    let new = again.samples();
    let worst = (0..new.len().min(orig.len() - k))
        .map(|j| (&new.points[j] - &orig.points[k + j]).norm())
        .fold(0.0, f64::max);
    assert!(worst < 1e-4, "{worst:e}");
}
