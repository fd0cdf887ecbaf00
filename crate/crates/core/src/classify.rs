//! Case analysis for biharmonic Legendre curves in a Sasakian space form
//! `N(c)`, the complete order-4 profile and the Case IV constraint system.

use std::f64::consts::{PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::curves::FrenetData;

/// Residual bound for closed-form constraint checks.
pub const EXACT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Case {
    I,
    II,
    III,
    IV,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// Only geodesics are biharmonic in this case; the curve is not proper-biharmonic.
    GeodesicOnly,
    ProperBiharmonic,
    NotProperBiharmonic,
}

impl Verdict {
    pub fn is_proper(self) -> bool {
        self == Verdict::ProperBiharmonic
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstraintKind {
    /// `measured = target`.
    Equality,
    /// `measured > target`.
    Greater,
    /// `measured < target`.
    Less,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub name: String,
    pub kind: ConstraintKind,
    pub target: f64,
    pub measured: f64,
    pub residual: f64,
    pub satisfied: bool,
}

impl Constraint {
    pub fn equality(name: &str, target: f64, measured: f64, tol: f64) -> Self {
        let residual = (measured - target).abs();
        Self {
            name: name.into(),
            kind: ConstraintKind::Equality,
            target,
            measured,
            residual,
            satisfied: residual < tol,
        }
    }

    pub fn greater(name: &str, target: f64, measured: f64) -> Self {
        Self {
            name: name.into(),
            kind: ConstraintKind::Greater,
            target,
            measured,
            residual: (target - measured).max(0.0),
            satisfied: measured > target,
        }
    }

    pub fn less(name: &str, target: f64, measured: f64) -> Self {
        Self {
            name: name.into(),
            kind: ConstraintKind::Less,
            target,
            measured,
            residual: (measured - target).max(0.0),
            satisfied: measured < target,
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel = match self.kind {
            ConstraintKind::Equality => "=",
            ConstraintKind::Greater => ">",
            ConstraintKind::Less => "<",
        };
        write!(
            f,
            "{}: target {rel} {} vs measured {} (residual {:.3e}) {}",
            self.name,
            Num(self.target),
            Num(self.measured),
            self.residual,
            if self.satisfied { "ok" } else { "VIOLATED" }
        )
    }
}

/// Short values verbatim; long ones rounded, in scientific form when tiny or huge.
struct Num(f64);

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.0;
        let plain = v.to_string();
        if plain.len() <= 14 {
            f.write_str(&plain)
        } else if (1e-3..1e6).contains(&v.abs()) {
            write!(f, "{v:.12}")
        } else {
            write!(f, "{v:.6e}")
        }
    }
}

/// Mean and spread of a sampled invariant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorsionStat {
    pub i: usize,
    pub j: usize,
    pub mean: f64,
    pub std: f64,
}

/// Summary of a Frenet apparatus consumed by [`classify`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrenetInvariants {
    pub order: usize,
    /// `κ_1 .. κ_{r-1}`.
    pub kappa: Vec<Stat>,
    /// `τ_ij` for `i < j ≤ r`.
    pub torsions: Vec<TorsionStat>,
}

impl FrenetInvariants {
    pub fn from_frenet(fd: &FrenetData) -> Self {
        let kappa = (1..fd.order)
            .filter_map(|i| fd.curvature_stats(i))
            .map(|(mean, std)| Stat { mean, std })
            .collect();
        let torsions = fd
            .torsions
            .pairs()
            .filter_map(|(i, j)| {
                fd.torsions
                    .stats(i, j)
                    .map(|(mean, std)| TorsionStat { i, j, mean, std })
            })
            .collect();
        Self {
            order: fd.order,
            kappa,
            torsions,
        }
    }

    /// Invariants of a curve with constant curvatures and torsions.
    pub fn constant(order: usize, kappa: &[f64], torsions: &[((usize, usize), f64)]) -> Self {
        Self {
            order,
            kappa: kappa.iter().map(|&mean| Stat { mean, std: 0.0 }).collect(),
            torsions: torsions
                .iter()
                .map(|&((i, j), mean)| TorsionStat { i, j, mean, std: 0.0 })
                .collect(),
        }
    }

    pub fn kappa(&self, i: usize) -> Option<Stat> {
        if i == 0 {
            return None;
        }
        self.kappa.get(i - 1).copied()
    }

    /// `τ_ij` with `τ_ji = -τ_ij`; missing entries below the order are zero.
    pub fn tau(&self, i: usize, j: usize) -> Option<Stat> {
        if i == j || i.max(j) > self.order {
            return None;
        }
        let (lo, hi, sign) = if i < j { (i, j, 1.0) } else { (j, i, -1.0) };
        let found = self
            .torsions
            .iter()
            .find(|t| t.i == lo && t.j == hi)
            .map(|t| Stat {
                mean: sign * t.mean,
                std: t.std,
            });
        Some(found.unwrap_or(Stat { mean: 0.0, std: 0.0 }))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationVerdict {
    pub case: Case,
    pub verdict: Verdict,
    pub c: f64,
    pub order: usize,
    pub constraints: Vec<Constraint>,
    pub required_ambient_n: Option<usize>,
    pub alpha0: Option<f64>,
    pub notes: Vec<String>,
}

impl fmt::Display for ClassificationVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "case {:?}, c = {}, order {}: {:?}",
            self.case, self.c, self.order, self.verdict
        )?;
        if let Some(n) = self.required_ambient_n {
            writeln!(f, "  requires n >= {n}")?;
        }
        if let Some(a) = self.alpha0 {
            writeln!(f, "  alpha0 = {a}")?;
        }
        for c in &self.constraints {
            writeln!(f, "  {c}")?;
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        Ok(())
    }
}

fn order_constraint(max_order: usize, order: usize) -> Constraint {
    Constraint {
        name: format!("osculating_order <= {max_order}"),
        kind: ConstraintKind::Less,
        target: (max_order + 1) as f64,
        measured: order as f64,
        residual: order.saturating_sub(max_order) as f64,
        satisfied: order <= max_order,
    }
}

fn constancy(inv: &FrenetInvariants, tol: f64) -> Vec<Constraint> {
    inv.kappa
        .iter()
        .enumerate()
        .map(|(i, s)| Constraint::less(&format!("kappa{}_std", i + 1), tol, s.std))
        .collect()
}

/// Applies the case conditions to the invariants of a Legendre Frenet curve in
/// `N(c)`. `tol` bounds equality residuals and the spread accepted as
/// "constant".
pub fn classify(c: f64, inv: &FrenetInvariants, tol: f64) -> ClassificationVerdict {
    let mut out = ClassificationVerdict {
        case: Case::I,
        verdict: Verdict::NotProperBiharmonic,
        c,
        order: inv.order,
        constraints: Vec::new(),
        required_ambient_n: None,
        alpha0: None,
        notes: Vec::new(),
    };
    let r = inv.order;
    let k = |i: usize| inv.kappa(i).map(|s| s.mean).unwrap_or(0.0);
    let c_is_one = (c - 1.0).abs() < EXACT_TOL;

    if r <= 1 {
        out.case = if c_is_one { Case::I } else { Case::II };
        out.notes
            .push("geodesic: harmonic, hence biharmonic but not proper-biharmonic".into());
        return out;
    }

    let t12 = inv.tau(1, 2).unwrap_or(Stat { mean: 0.0, std: 0.0 });
    if !c_is_one && t12.std >= tol {
        out.case = Case::Mixed;
        out.constraints
            .push(Constraint::less("tau12_std", tol, t12.std));
        out.notes.push(
            "g(E2, phi T) is not constant; a proper-biharmonic curve needs constant tau12".into(),
        );
        return out;
    }

    let mut cons = constancy(inv, tol);
    if c_is_one {
        out.case = Case::I;
        out.required_ambient_n = Some(2);
        match r {
            2 => cons.push(Constraint::equality("kappa1 = 1", 1.0, k(1), tol)),
            3 => cons.push(Constraint::equality(
                "kappa1^2 + kappa2^2 = 1",
                1.0,
                k(1).powi(2) + k(2).powi(2),
                tol,
            )),
            _ => cons.push(order_constraint(3, r)),
        }
    } else if t12.mean.abs() < tol {
        out.case = Case::II;
        if c <= -3.0 {
            out.verdict = Verdict::GeodesicOnly;
            out.constraints = vec![Constraint::greater("c > -3", -3.0, c)];
            out.notes.push("c <= -3: biharmonic iff geodesic".into());
            return out;
        }
        let target = (c + 3.0) / 4.0;
        match r {
            2 => {
                out.required_ambient_n = Some(2);
                cons.push(Constraint::equality("kappa1^2 = (c+3)/4", target, k(1).powi(2), tol));
            }
            3 => {
                out.required_ambient_n = Some(3);
                cons.push(Constraint::equality(
                    "kappa1^2 + kappa2^2 = (c+3)/4",
                    target,
                    k(1).powi(2) + k(2).powi(2),
                    tol,
                ));
            }
            _ => cons.push(order_constraint(3, r)),
        }
    } else if (1.0 - t12.mean.abs()).abs() < tol {
        out.case = Case::III;
        if c < 1.0 {
            out.verdict = Verdict::GeodesicOnly;
            out.constraints = vec![Constraint::greater("c > 1", 1.0, c)];
            out.notes.push("c < 1 with E2 parallel to phi T: biharmonic iff geodesic".into());
            return out;
        }
        out.required_ambient_n = Some(1);
        cons.push(Constraint::equality("kappa1^2 = c - 1", c - 1.0, k(1).powi(2), tol));
        cons.push(Constraint::equality("kappa2 = 1", 1.0, k(2), tol));
        cons.push(Constraint::equality("osculating_order = 3", 3.0, r as f64, 0.5));
    } else {
        out.case = Case::IV;
        if c <= -3.0 {
            out.verdict = Verdict::GeodesicOnly;
            out.constraints = vec![Constraint::greater("c > -3", -3.0, c)];
            out.notes.push("c <= -3: biharmonic iff geodesic".into());
            return out;
        }
        out.required_ambient_n = Some(2);
        cons.push(Constraint::greater("osculating_order >= 4", 3.5, r as f64));
        if r >= 4 {
            let t14 = inv.tau(1, 4).map(|s| s.mean).unwrap_or(0.0);
            let alpha0 = (-t14).atan2(-t12.mean).rem_euclid(TAU);
            out.alpha0 = Some(alpha0);
            cons.push(Constraint::equality(
                "phi T in span(E2, E4)",
                1.0,
                t12.mean.powi(2) + t14.powi(2),
                tol,
            ));
            cons.extend(case4_constraints_with_tol(c, k(1), k(2), k(3), alpha0, tol));
        }
    }
    out.verdict = if cons.iter().all(|c| c.satisfied) {
        Verdict::ProperBiharmonic
    } else {
        Verdict::NotProperBiharmonic
    };
    out.constraints = cons;
    out
}

/// [`classify`] applied to measured Frenet data.
pub fn classify_frenet(c: f64, fd: &FrenetData, tol: f64) -> ClassificationVerdict {
    let mut v = classify(c, &FrenetInvariants::from_frenet(fd), tol);
    v.notes.extend(fd.warnings.iter().cloned());
    v
}

/// Case IV system: the two equalities and the two inequalities on `α₀`.
pub fn case4_constraints(c: f64, k1: f64, k2: f64, k3: f64, alpha0: f64) -> Vec<Constraint> {
    case4_constraints_with_tol(c, k1, k2, k3, alpha0, EXACT_TOL)
}

pub fn case4_constraints_with_tol(
    c: f64,
    k1: f64,
    k2: f64,
    k3: f64,
    alpha0: f64,
    tol: f64,
) -> Vec<Constraint> {
    let cos2 = alpha0.cos().powi(2);
    vec![
        Constraint::equality(
            "kappa1^2 + kappa2^2 = (c+3)/4 + 3(c-1)/4 cos^2(alpha0)",
            (c + 3.0) / 4.0 + 0.75 * (c - 1.0) * cos2,
            k1 * k1 + k2 * k2,
            tol,
        ),
        Constraint::equality(
            "kappa2 kappa3 = -3(c-1)/8 sin(2 alpha0)",
            -3.0 * (c - 1.0) / 8.0 * (2.0 * alpha0).sin(),
            k2 * k3,
            tol,
        ),
        Constraint::greater("c + 3 + 3(c-1) cos^2(alpha0) > 0", 0.0, c + 3.0 + 3.0 * (c - 1.0) * cos2),
        Constraint::less("3(c-1) sin(2 alpha0) < 0", 0.0, 3.0 * (c - 1.0) * (2.0 * alpha0).sin()),
    ]
}

/// `(κ₁², κ₂², κ₃²)` of the order-4 profile as rational functions of `c`.
pub fn order4_kappa_squared(c: f64) -> [f64; 3] {
    [
        (c + 3.0) / 4.0,
        6.0 * (c - 1.0) * (5.0 - c) / (4.0 * (c + 3.0)),
        3.0 * (c - 1.0) * (3.0 * c - 7.0) / (4.0 * (c + 3.0)),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Order4Branch {
    /// `+1` for the upper signs of `∓/±`, `-1` for the lower.
    pub sign: i8,
    pub alpha0: f64,
    /// Antisymmetric `τ_ij`, zero-based `[i-1][j-1]`.
    pub tau: [[f64; 4]; 4],
}

impl Order4Branch {
    /// `τ_ij` with 1-based indices.
    pub fn tau(&self, i: usize, j: usize) -> f64 {
        self.tau[i - 1][j - 1]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Order4Profile {
    pub c: f64,
    pub kappa: Option<[f64; 3]>,
    pub branches: Vec<Order4Branch>,
    pub reason: Option<String>,
}

impl Order4Profile {
    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    pub fn branch(&self, sign: i8) -> Option<&Order4Branch> {
        self.branches.iter().find(|b| b.sign == sign)
    }
}

/// Curvatures and both torsion branches of a proper-biharmonic Legendre
/// curve of osculating order 4, or an empty profile when `c ∉ (7/3, 5)`.
pub fn order4_profile(c: f64) -> Order4Profile {
    if !(c > 7.0 / 3.0 && c < 5.0) {
        return Order4Profile {
            c,
            kappa: None,
            branches: Vec::new(),
            reason: Some(format!("c = {c} not in (7/3, 5): no curve of osculating order 4")),
        };
    }
    let [a, b, d] = order4_kappa_squared(c);
    let kappa = [a.sqrt(), b.sqrt(), d.sqrt()];
    let t12 = (2.0 * (5.0 - c) / (c + 3.0)).sqrt();
    let t14 = ((3.0 * c - 7.0) / (c + 3.0)).sqrt();
    let t23 = (3.0 * c - 7.0) / (3.0 * (c - 1.0) * (c + 3.0)).sqrt();
    let t34 = (2.0 * (5.0 - c) * (3.0 * c - 7.0) / (3.0 * (c - 1.0) * (c + 3.0))).sqrt();
    let branches = [1i8, -1]
        .into_iter()
        .map(|sign| {
            let s = sign as f64;
            let mut tau = [[0.0; 4]; 4];
            let mut set = |i: usize, j: usize, v: f64| {
                tau[i - 1][j - 1] = v;
                tau[j - 1][i - 1] = -v;
            };
            set(1, 2, -s * t12);
            set(1, 4, s * t14);
            set(2, 3, -s * t23);
            set(3, 4, s * t34);
            // τ12 = -cos α₀, τ14 = -sin α₀
            let alpha0 = (-s * t14).atan2(s * t12).rem_euclid(TAU);
            Order4Branch { sign, alpha0, tau }
        })
        .collect();
    Order4Profile {
        c,
        kappa: Some(kappa),
        branches,
        reason: None,
    }
}

/// True when `α₀` lies in one of the quadrants allowed by `κ₂ sin α₀ = -κ₃ cos α₀`.
pub fn alpha0_in_allowed_quadrants(alpha0: f64) -> bool {
    let a = alpha0.rem_euclid(TAU);
    (a > PI / 2.0 && a < PI) || (a > 1.5 * PI && a < TAU)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_one_circle() {
        let inv = FrenetInvariants::constant(2, &[1.0], &[((1, 2), 0.0)]);
        let v = classify(1.0, &inv, 1e-5);
        assert_eq!((v.case, v.verdict, v.required_ambient_n), (Case::I, Verdict::ProperBiharmonic, Some(2)));
    }

    #[test]
    fn case_one_helix_needs_unit_sum() {
        let ok = FrenetInvariants::constant(3, &[0.6, 0.8], &[((1, 2), 0.0)]);
        assert!(classify(1.0, &ok, 1e-5).verdict.is_proper());
        let bad = FrenetInvariants::constant(3, &[0.6, 0.7], &[((1, 2), 0.0)]);
        assert_eq!(classify(1.0, &bad, 1e-5).verdict, Verdict::NotProperBiharmonic);
    }

    #[test]
    fn case_two_flat_is_geodesic_only() {
        let inv = FrenetInvariants::constant(2, &[0.7], &[((1, 2), 0.0)]);
        let v = classify(-3.0, &inv, 1e-5);
        assert_eq!((v.case, v.verdict), (Case::II, Verdict::GeodesicOnly));
        assert!(!v.verdict.is_proper());
    }

    #[test]
    fn case_two_helix_requires_three_dims() {
        let k1: f64 = 0.5;
        let k2 = (1.25 - k1 * k1).sqrt();
        let inv = FrenetInvariants::constant(3, &[k1, k2], &[((1, 2), 0.0)]);
        let v = classify(2.0, &inv, 1e-5);
        assert_eq!((v.case, v.verdict, v.required_ambient_n), (Case::II, Verdict::ProperBiharmonic, Some(3)));
    }

    #[test]
    fn case_three_at_c5() {
        let inv = FrenetInvariants::constant(3, &[2.0, 1.0], &[((1, 2), -1.0)]);
        let v = classify(5.0, &inv, 1e-5);
        assert_eq!((v.case, v.verdict), (Case::III, Verdict::ProperBiharmonic));
        let off = FrenetInvariants::constant(3, &[2.1, 1.0], &[((1, 2), 1.0)]);
        assert_eq!(classify(5.0, &off, 1e-5).verdict, Verdict::NotProperBiharmonic);
        assert_eq!(classify(0.5, &inv, 1e-5).verdict, Verdict::GeodesicOnly);
    }

    #[test]
    fn non_constant_tau12_is_mixed() {
        let mut inv = FrenetInvariants::constant(3, &[1.0, 0.5], &[((1, 2), 0.3)]);
        inv.torsions[0].std = 0.1;
        let v = classify(3.0, &inv, 1e-5);
        assert_eq!((v.case, v.verdict), (Case::Mixed, Verdict::NotProperBiharmonic));
    }

    #[test]
    fn order4_profile_at_three() {
        let p = order4_profile(3.0);
        let k = p.kappa.unwrap();
        assert!((k[0] - 6f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((k[1] - 1.0).abs() < 1e-15);
        assert!((k[2] - 2f64.sqrt() / 2.0).abs() < 1e-15);
        let up = p.branch(1).unwrap();
        assert!((up.tau(1, 2) + (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((up.tau(1, 4) - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((up.tau(2, 3) + 1.0 / 3.0).abs() < 1e-15);
        assert!((up.tau(3, 4) - 2f64.sqrt() / 3.0).abs() < 1e-15);
        assert_eq!(up.tau(1, 3), 0.0);
        assert_eq!(up.tau(2, 4), 0.0);
        assert_eq!(up.tau(2, 1), -up.tau(1, 2));
        let down = p.branch(-1).unwrap();
        assert_eq!(down.tau(2, 3), -up.tau(2, 3));
        for b in &p.branches {
            assert!(alpha0_in_allowed_quadrants(b.alpha0));
            for con in case4_constraints(3.0, k[0], k[1], k[2], b.alpha0) {
                assert!(con.satisfied && con.residual < 1e-12, "{con}");
            }
        }
    }

    #[test]
    fn order4_interval_is_open() {
        assert!(order4_profile(7.0 / 3.0).is_empty());
        assert!(order4_profile(5.0).is_empty());
        assert!(order4_profile(2.0).reason.unwrap().contains("(7/3, 5)"));
        for c in [7.0 / 3.0 + 1e-3, 5.0 - 1e-3] {
            assert!(order4_kappa_squared(c).iter().all(|&k| k > 0.0));
        }
        for c in [7.0 / 3.0 - 1e-3, 5.0 + 1e-3] {
            assert!(order4_kappa_squared(c).iter().any(|&k| k < 0.0));
        }
    }

    #[test]
    fn case4_inequality_flags_wrong_quadrant() {
        let cons = case4_constraints(3.0, 1.0, 1.0, 1.0, PI / 4.0);
        assert!(!cons[3].satisfied);
    }

    #[test]
    fn no_admissible_alpha_at_c_minus_three() {
        for k in 1..1000 {
            let a = k as f64 * TAU / 1000.0;
            let cons = case4_constraints(-3.0, 1.0, 1.0, 1.0, a);
            assert!(!(cons[2].satisfied && cons[3].satisfied), "alpha0 = {a}");
        }
    }

    #[test]
    fn case_two_continues_case_one() {
        let c = 1.0;
        assert_eq!((c + 3.0) / 4.0, 1.0);
    }

    #[test]
    fn text_rendering_lists_constraints() {
        let inv = FrenetInvariants::constant(2, &[1.0], &[((1, 2), 0.0)]);
        let s = classify(1.0, &inv, 1e-5).to_string();
        assert!(s.contains("kappa1 = 1: target = 1 vs measured 1"));
    }
}
