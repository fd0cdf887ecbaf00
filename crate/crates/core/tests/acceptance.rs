//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

use std::f64::consts::FRAC_1_SQRT_2;
use std::time::{Duration, Instant};

use biharmonic_core::bitension::{self, BiharmonicVerdict};
use biharmonic_core::classify::{self, Case, Verdict};
use biharmonic_core::constructors::{self, DEFAULT_CURVE_LENGTH};
use biharmonic_core::curves;
use biharmonic_core::hopf::{self, HopfVerdict, TakagiShape};
use biharmonic_core::models::SpaceFormModel;
use biharmonic_core::tolerances::Tolerances;
use biharmonic_core::{axioms, oracle, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn within(elapsed: Duration, secs: f64) -> bool {
    elapsed.as_secs_f64() < secs
}

fn c1_axioms() -> Result<Outcome> {
    let start = Instant::now();
    let models = [
        SpaceFormModel::unit_sphere(2)?,
        SpaceFormModel::flat(2)?,
        SpaceFormModel::deformed_sphere(2.0, 2)?,
    ];
    let mut pass = true;
    let mut worst = Vec::new();
    for m in &models {
        let r = axioms::validate_model(m, 100, 7);
        pass &= r.passed;
        let failing: Vec<_> = r.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        let max = r.checks.iter().map(|c| c.max_residual / c.tolerance).fold(0.0, f64::max);
        worst.push(format!("{} worst residual/tol {max:.1e}{}", m.name(), if failing.is_empty() { String::new() } else { format!(" failing {failing:?}") }));
    }
    let el = start.elapsed();
    outcome(pass && within(el, 5.0), format!("{}; {el:.2?} (< 5 s)", worst.join(", ")))
}

fn c2_curvature_calibration() -> Result<Outcome> {
    let start = Instant::now();
    let mut models = vec![SpaceFormModel::unit_sphere(2)?, SpaceFormModel::flat(2)?];
    for a in [0.5, 2.0, 4.0] {
        models.push(SpaceFormModel::deformed_sphere(a, 2)?);
    }
    let expected = [1.0, -3.0, 5.0, -1.0, -2.0];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for (m, c) in models.iter().zip(expected) {
        if (m.c() - c).abs() > 1e-14 {
            return outcome(false, format!("{} reports c = {}", m.name(), m.c()));
        }
        for _ in 0..10 {
            let p = m.random_point(&mut rng);
            let u = m.random_contact_unit(&mut rng, &p);
            let pu = m.phi_at(&p, &u);
            worst = worst.max((oracle::sectional_curvature_fd(m, &p, &u, &pu) - c).abs());
        }
    }
    let el = start.elapsed();
    outcome(worst < 1e-5 && within(el, 10.0), format!("max |K(X,φX) - c| = {worst:.2e} (< 1e-5); {el:.2?} (< 10 s)"))
}

fn c3_catalog() -> Result<Outcome> {
    let start = Instant::now();
    let mut curves = vec![("circle".to_string(), constructors::circle_curve(2)?)];
    for k in [0.2, 0.4, 0.6, 0.8] {
        curves.push((format!("helix {k}"), constructors::helix_curve(2, k)?));
    }
    let (mut leg, mut sphere, mut direct, mut frenet): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    let mut pass = true;
    for (name, c) in &curves {
        let a = bitension::analyze(c, Tolerances::default())?;
        leg = leg.max(curves::legendre_residual(c)?);
        let fd = &a.frenet;
        for k in fd.interior.clone() {
            let k1 = *fd.curvatures[0].at(k);
            let k2 = if fd.order >= 3 { *fd.curvatures[1].at(k) } else { 0.0 };
            sphere = sphere.max((k1 * k1 + k2 * k2 - 1.0).abs());
        }
        direct = direct.max(a.report.bitension_direct_max);
        frenet = frenet.max(a.report.bitension_frenet_max);
        if a.report.verdict != BiharmonicVerdict::ProperBiharmonic {
            pass = false;
            eprintln!("  {name}: {:?}", a.report.verdict);
        }
    }
    let el = start.elapsed();
    pass &= leg < 1e-8 && sphere < 1e-5 && direct < 1e-5 && frenet < 1e-5 && within(el, 30.0);
    outcome(
        pass,
        format!("legendre {leg:.1e} (< 1e-8), |κ₁²+κ₂²-1| {sphere:.1e} (< 1e-5), direct {direct:.1e}, frenet {frenet:.1e} (< 1e-5); {el:.2?} (< 30 s)"),
    )
}

fn c4_negative_control() -> Result<Outcome> {
    let c = constructors::small_circle_curve(2, 0.5)?;
    let a = bitension::analyze(&c, Tolerances::default())?;
    let cls = classify::classify_frenet(1.0, &a.frenet, Tolerances::default().closed_form);
    let pass = a.report.bitension_direct_max >= 0.3
        && a.report.verdict == BiharmonicVerdict::NotBiharmonic
        && cls.verdict == Verdict::NotProperBiharmonic;
    outcome(pass, format!("bitension {:.3} (>= 0.3), {:?}, classification {:?}", a.report.bitension_direct_max, a.report.verdict, cls.verdict))
}

fn c5_evaluator_agreement() -> Result<Outcome> {
    let start = Instant::now();
    let models = [
        SpaceFormModel::unit_sphere(2)?,
        SpaceFormModel::flat(2)?,
        SpaceFormModel::deformed_sphere(0.5, 2)?,
        SpaceFormModel::deformed_sphere(2.0, 2)?,
    ];
    let mut gap: f64 = 0.0;
    for seed in 0..50u64 {
        let m = &models[seed as usize % models.len()];
        let (c, _) = constructors::random_legendre_curve(m, 1000 + seed, DEFAULT_CURVE_LENGTH)?;
        let a = bitension::analyze(&c, Tolerances::default())?;
        gap = gap.max(a.report.evaluator_gap_max);
    }
    let el = start.elapsed();
    outcome(gap < 1e-4 && within(el, 120.0), format!("max |τ₂ direct - τ₂ frenet| = {gap:.2e} over 50 curves (< 1e-4); {el:.2?} (< 120 s)"))
}

fn c6_case_three() -> Result<Outcome> {
    let good = constructors::case3_curve(5.0, 2, 2.0, 1, DEFAULT_CURVE_LENGTH)?;
    let a = bitension::analyze(&good, Tolerances::default())?;
    let cls = classify::classify_frenet(5.0, &a.frenet, 1e-4);
    let residual = a.report.bitension_direct_max.max(a.report.bitension_frenet_max);
    let bad = constructors::case3_curve(5.0, 2, 2.1, 1, DEFAULT_CURVE_LENGTH)?;
    let b = bitension::analyze(&bad, Tolerances::default())?;
    let bcls = classify::classify_frenet(5.0, &b.frenet, 1e-4);
    let pass = residual < 1e-4
        && a.report.verdict == BiharmonicVerdict::ProperBiharmonic
        && cls.case == Case::III
        && cls.verdict == Verdict::ProperBiharmonic
        && b.report.verdict == BiharmonicVerdict::NotBiharmonic
        && bcls.verdict == Verdict::NotProperBiharmonic;
    outcome(
        pass,
        format!(
            "κ₁=2: residual {residual:.1e} (< 1e-4), {:?}, case {:?} {:?}; κ₁=2.1: bitension {:.3}, {:?}, {:?}",
            a.report.verdict, cls.case, cls.verdict, b.report.bitension_direct_max, b.report.verdict, bcls.verdict
        ),
    )
}

fn c7_order_four() -> Result<Outcome> {
    let p = classify::order4_profile(3.0);
    let k = p.kappa.unwrap_or([f64::NAN; 3]);
    let expected = [6f64.sqrt() / 2.0, 1.0, FRAC_1_SQRT_2];
    let mut pass = k.iter().zip(expected).all(|(a, b)| (a - b).abs() < 1e-12) && p.branches.len() == 2;
    for b in &p.branches {
        let s = b.sign as f64;
        pass &= (b.tau(2, 3) + s / 3.0).abs() < 1e-12;
        pass &= (b.tau(3, 4) - s * 2f64.sqrt() / 3.0).abs() < 1e-12;
        pass &= classify::case4_constraints(3.0, k[0], k[1], k[2], b.alpha0).iter().all(|c| c.satisfied);
    }
    let curve = constructors::order4_curve(3.0, 2, 1, DEFAULT_CURVE_LENGTH)?;
    let a = bitension::analyze(&curve, Tolerances::default())?;
    let residual = a.report.bitension_direct_max.max(a.report.bitension_frenet_max);
    pass &= residual < 1e-4 && a.report.verdict == BiharmonicVerdict::ProperBiharmonic && a.frenet.order == 4;
    outcome(
        pass,
        format!("κ = ({:.6}, {:.6}, {:.6}), τ table and constraints to 1e-12; ODE curve order {} residual {residual:.1e} (< 1e-4) {:?}", k[0], k[1], k[2], a.frenet.order, a.report.verdict),
    )
}

fn c8_flow_cylinder() -> Result<Outcome> {
    let circle = constructors::flow_cylinder(&constructors::circle_curve(2)?, (0.0, 1.0))?;
    let r = constructors::cylinder_bitension_check(&circle)?;
    let geo = constructors::flow_cylinder(&constructors::legendre_geodesic(2)?, (0.0, 1.0))?;
    let g = constructors::cylinder_bitension_check(&geo)?;
    let dev = (r.tension_max - 1.0).abs().max((r.tension_min - 1.0).abs());
    let pass = r.metric_residual < 1e-6 && dev < 5e-3 && g.tension_max < 5e-3;
    outcome(
        pass,
        format!("circle: metric {:.1e} (< 1e-6), |‖τ(F)‖-1| {dev:.1e} (< 5e-3); geodesic: ‖τ(F)‖ {:.1e} (< 5e-3)", r.metric_residual, g.tension_max),
    )
}

fn c9_hopf_roots() -> Result<Outcome> {
    let shape = TakagiShape::a1(2)?;
    let sol = hopf::solve_biharmonic_u(&shape, 1.0)?;
    let mut pass = sol.roots.len() == 2
        && (sol.roots[0].tan2u - 1.0).abs() < 1e-14
        && sol.roots[0].verdict == HopfVerdict::ProperBiharmonic
        && (sol.roots[1].tan2u - 3.0).abs() < 1e-14
        && sol.roots[1].verdict == HopfVerdict::Minimal
        && (sol.roots[0].norm_b_sq - 2.0).abs() < 1e-14
        && hopf::cmc_rhs(1.0, 2) == 2.0;

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst_rel: f64 = 0.0;
    let mut draws = 0;
    while draws < 200 {
        let shape = if rng.random_bool(0.5) {
            TakagiShape::a1(rng.random_range(2..12))?
        } else {
            TakagiShape::a2(rng.random_range(1..6), rng.random_range(1..6))?
        };
        let c: f64 = rng.random_range(-2.9..8.0);
        // Keep away from the tangential double root, where both computations lose digits.
        if shape.discriminant(c) < 1e-3 || hopf::cmc_rhs(c, shape.n) <= 0.0 {
            continue;
        }
        draws += 1;
        let closed = hopf::closed_form_roots(&shape, c).unwrap();
        let f = |t: f64| {
            let h = hopf::TakagiHypersurface::from_tan2u(shape, t, c).unwrap();
            t * (hopf::spectrum(&h).unwrap().norm_b_sq - hopf::cmc_rhs(c, shape.n)) / hopf::radius_sq(c)
        };
        let [a, b, cc] = oracle::quadratic_through(f, [0.5, 1.0, 2.0]);
        let indep = oracle::quadratic_roots(a, b, cc);
        if indep.len() != 2 {
            pass = false;
            continue;
        }
        for (x, y) in [closed.0, closed.1].iter().zip(&indep) {
            worst_rel = worst_rel.max((x - y).abs() / y.abs().max(1.0));
        }
    }

    let mut worst_thr: f64 = 0.0;
    let mut shapes: Vec<TakagiShape> = (2..=10).map(TakagiShape::a1).collect::<Result<_>>()?;
    for (p, q) in [(1, 1), (1, 2), (2, 1), (1, 4), (2, 2), (3, 3), (5, 2)] {
        shapes.push(TakagiShape::a2(p, q)?);
    }
    for s in &shapes {
        let zs = oracle::scan_roots(|c| s.discriminant(c), -2.999, 5.0, 20_001);
        let numeric = zs.last().copied().unwrap_or(f64::NAN);
        worst_thr = worst_thr.max((hopf::existence_threshold(s) - numeric).abs());
    }
    pass &= worst_rel < 1e-12 && worst_thr < 1e-9;
    outcome(
        pass,
        format!("A1(n=2,c=1) roots {{1: proper, 3: minimal}}, ‖B̄‖² = 2; closed vs quadratic rel {worst_rel:.1e} (< 1e-12) over 200 draws; threshold vs discriminant zero {worst_thr:.1e} (< 1e-9)"),
    )
}

fn c10_non_existence() -> Result<Outcome> {
    let mut pass = true;
    let mut checked = 0;
    for n in 2..=6 {
        let bound = hopf::non_existence_bound(n);
        let mut shapes = vec![TakagiShape::a1(n)?];
        for p in 1..n - 1 {
            shapes.push(TakagiShape::a2(p, n - 1 - p)?);
        }
        for k in 0..=20 {
            let c = -2.999 + (bound + 2.999) * k as f64 / 20.0;
            let chk = hopf::cmc_criterion(c, n, 1.0);
            pass &= !chk.satisfiable && chk.rhs <= 1e-12;
            for s in &shapes {
                pass &= hopf::solve_biharmonic_u(s, c)?.roots.is_empty();
                checked += 1;
            }
        }
    }
    outcome(pass, format!("{checked} (shape, c) pairs with c <= (5-3n)/(n+1), n in 2..=6: RHS <= 0 and no roots"))
}

fn c11_hopf3() -> Result<Outcome> {
    use hopf::Hopf3Verdict::*;
    let ok = hopf::hopf3_criterion(5.0, 2.0).verdict == ProperBiharmonic
        && hopf::hopf3_criterion(5.0, 1.0).verdict == NotProperBiharmonic
        && [1.0, 0.5, -1.0, -2.9]
            .iter()
            .all(|&c| [0.0, 0.5, 1.0, 3.0].iter().all(|&k| hopf::hopf3_criterion(c, k).verdict == MinimalOnly));
    outcome(ok, "c=5, κ̄=2 accepted; c=5, κ̄=1 rejected; c <= 1 minimal-only".into())
}

type Criterion = (&'static str, fn() -> Result<Outcome>);

fn main() {
    let criteria: [Criterion; 11] = [
        ("structure axioms", c1_axioms),
        ("curvature calibration", c2_curvature_calibration),
        ("circle and helix catalog", c3_catalog),
        ("negative control", c4_negative_control),
        ("evaluator agreement", c5_evaluator_agreement),
        ("case III end-to-end", c6_case_three),
        ("order-4 end-to-end", c7_order_four),
        ("flow cylinder", c8_flow_cylinder),
        ("Hopf roots", c9_hopf_roots),
        ("non-existence", c10_non_existence),
        ("3-dimensional criterion", c11_hopf3),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f().unwrap_or_else(|e| Outcome { pass: false, detail: format!("error: {e}") });
        if !o.pass {
            failed += 1;
        }
        println!("{} criterion {:>2} ({name}): {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
