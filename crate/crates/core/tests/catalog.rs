//! Constructor catalog run end to end through frenet, bitension and classify.

use biharmonic_core::bitension::{self, BiharmonicVerdict};
use biharmonic_core::classify::{self, Case, Verdict};
use biharmonic_core::constructors::{self, DEFAULT_CURVE_LENGTH};
use biharmonic_core::curves::{self, ParamCurve};
use biharmonic_core::tolerances::Tolerances;

struct Entry {
    name: &'static str,
    c: f64,
    curve: ParamCurve,
    case: Case,
    verdict: Verdict,
}

fn catalog() -> Vec<Entry> {
    let l = DEFAULT_CURVE_LENGTH;
    let mut out = vec![
        Entry { name: "unit circle", c: 1.0, curve: constructors::circle_curve(2).unwrap(), case: Case::I, verdict: Verdict::ProperBiharmonic },
        Entry { name: "unit helix 0.4", c: 1.0, curve: constructors::helix_curve(2, 0.4).unwrap(), case: Case::I, verdict: Verdict::ProperBiharmonic },
        Entry { name: "unit helix n=3", c: 1.0, curve: constructors::helix_curve(3, 0.7).unwrap(), case: Case::I, verdict: Verdict::ProperBiharmonic },
        Entry { name: "case II circle c=-1", c: -1.0, curve: constructors::case2_circle_curve(-1.0, 2, l).unwrap(), case: Case::II, verdict: Verdict::ProperBiharmonic },
        Entry { name: "case II circle c=2", c: 2.0, curve: constructors::case2_circle_curve(2.0, 2, l).unwrap(), case: Case::II, verdict: Verdict::ProperBiharmonic },
        Entry { name: "case II helix c=2", c: 2.0, curve: constructors::case2_helix_curve(2.0, 3, 0.5, l).unwrap(), case: Case::II, verdict: Verdict::ProperBiharmonic },
        Entry { name: "case III c=5", c: 5.0, curve: constructors::case3_curve(5.0, 2, 2.0, 1, l).unwrap(), case: Case::III, verdict: Verdict::ProperBiharmonic },
        Entry { name: "case III c=5 sigma=-1", c: 5.0, curve: constructors::case3_curve(5.0, 2, 2.0, -1, l).unwrap(), case: Case::III, verdict: Verdict::ProperBiharmonic },
        Entry { name: "case III c=2", c: 2.0, curve: constructors::case3_curve(2.0, 2, 1.0, 1, l).unwrap(), case: Case::III, verdict: Verdict::ProperBiharmonic },
    ];
    for (c, sign) in [(3.0, 1), (3.0, -1), (4.0, 1)] {
        out.push(Entry {
            name: "order 4",
            c,
            curve: constructors::order4_curve(c, 2, sign, l).unwrap(),
            case: Case::IV,
            verdict: Verdict::ProperBiharmonic,
        });
    }
    out
}

#[test]
fn verdicts_match_the_classification() {
    for e in catalog() {
        let a = bitension::analyze(&e.curve, Tolerances::default()).unwrap();
        assert_eq!(a.report.verdict, BiharmonicVerdict::ProperBiharmonic, "{} c={}: {:?}", e.name, e.c, a.report);
        let cls = classify::classify_frenet(e.c, &a.frenet, 1e-4);
        assert_eq!((cls.case, cls.verdict), (e.case, e.verdict), "{} c={}:\n{cls}", e.name, e.c);
        assert!(curves::legendre_residual(&e.curve).unwrap() < 1e-6, "{}", e.name);
    }
}

#[test]
fn tenfold_tolerance_never_flips_a_verdict() {
    for e in catalog() {
        let base = bitension::verdict(&e.curve, Tolerances::default()).unwrap();
        let loose = bitension::verdict(&e.curve, Tolerances::default().scaled(10.0)).unwrap();
        assert_eq!(base.verdict, loose.verdict, "{}", e.name);
        let tol = base.tolerance;
        assert!(base.bitension_direct_max < tol / 100.0 && base.bitension_frenet_max < tol / 100.0, "{}: {base:?}", e.name);
    }
}

#[test]
fn torsions_are_constant_on_proper_biharmonic_curves() {
    for e in catalog() {
        let fd = curves::frenet(&e.curve, curves::DEFAULT_TOL_ORDER).unwrap();
        for (i, j) in fd.torsions.pairs().collect::<Vec<_>>() {
            let (_, std) = fd.torsions.stats(i, j).unwrap();
            assert!(std < 1e-6, "{} tau{i}{j} std {std:e}", e.name);
        }
    }
}

#[test]
fn eta_of_normal_vanishes_and_eta_e3_follows_tau12() {
    for e in catalog() {
        let fd = curves::frenet(&e.curve, curves::DEFAULT_TOL_ORDER).unwrap();
        let eta2 = &fd.eta_components[1];
        let worst = fd.interior.clone().map(|k| eta2.at(k).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-6, "{}: eta(E2) {worst:e}", e.name);
        if fd.order == 3 {
            let t12 = fd.torsions.get(1, 2).unwrap();
            let k2 = fd.curvature(2).unwrap();
            let eta3 = &fd.eta_components[2];
            let worst = fd
                .interior
                .clone()
                .map(|k| (eta3.at(k) + t12.at(k) / k2.at(k)).abs())
                .fold(0.0, f64::max);
            assert!(worst < 1e-5, "{}: eta(E3) + tau12/kappa2 {worst:e}", e.name);
        }
    }
}

#[test]
fn perturbed_profiles_are_rejected() {
    let l = DEFAULT_CURVE_LENGTH;
    let off = [
        (1.0, constructors::helix_curve(2, 0.6).unwrap(), true),
        (2.0, constructors::case3_curve(2.0, 2, 1.2, 1, l).unwrap(), false),
        (5.0, constructors::case3_curve(5.0, 2, 1.9, 1, l).unwrap(), false),
    ];
    for (c, curve, expect) in off {
        let a = bitension::analyze(&curve, Tolerances::default()).unwrap();
        assert_eq!(a.report.verdict == BiharmonicVerdict::ProperBiharmonic, expect, "c={c}");
        let cls = classify::classify_frenet(c, &a.frenet, 1e-4);
        assert_eq!(cls.verdict.is_proper(), expect, "c={c}:\n{cls}");
    }
}
