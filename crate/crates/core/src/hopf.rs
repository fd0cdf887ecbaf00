//! Hopf cylinders over Takagi hypersurfaces of type A1 and A2.
//!
//! A Hopf cylinder `π⁻¹(M̄)` over a CMC hypersurface `M̄ ⊂ CP^n` is proper
//! biharmonic exactly when `‖B̄‖² = (c(n+1)+3n-5)/2` and `H̄ ≠ 0`. For the
//! type A spectra this condition is a quadratic in `t = tan²u`, assembled
//! here from the spectrum itself.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distance from `0` and `π/2` below which `cot u`/`tan u` are treated as singular.
pub const SINGULAR_MARGIN: f64 = 1e-8;
/// Absolute tolerance of the CMC criterion.
pub const CMC_TOL: f64 = 1e-9;
/// `|H̄|` at or below this counts as minimal.
pub const MINIMAL_TOL: f64 = 1e-9;
/// Tolerance of the `κ̄² = c - 1` test in dimension three.
pub const HOPF3_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TakagiType {
    A1,
    A2,
}

impl fmt::Display for TakagiType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TakagiType::A1 => "A1",
            TakagiType::A2 => "A2",
        })
    }
}

/// Homogeneous types without principal-curvature data in this crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OtherTakagiType {
    B,
    C,
    D,
    E,
}

/// Informational status for types B to E.
pub fn other_type_status(_kind: OtherTakagiType) -> &'static str {
    "non-existence of proper-biharmonic Hopf cylinders is asserted for this type; not verified here (no principal-curvature data)"
}

/// Type and multiplicity data of a Takagi hypersurface, independent of `u` and `c`.
/// For A1, `p = q = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TakagiShape {
    pub kind: TakagiType,
    pub n: usize,
    pub p: usize,
    pub q: usize,
}

impl TakagiShape {
    pub fn a1(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Parameter(format!("type A1 needs n > 1, got {n}")));
        }
        Ok(Self { kind: TakagiType::A1, n, p: 0, q: 0 })
    }

    /// Type A2 in `CP^n` with `n = p + q + 1`.
    pub fn a2(p: usize, q: usize) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::Parameter(format!("type A2 needs p, q > 0, got p={p}, q={q}")));
        }
        Ok(Self { kind: TakagiType::A2, n: p + q + 1, p, q })
    }

    /// Builds a shape from loose CLI-style parameters; `n` is checked against `p + q + 1` for A2.
    pub fn from_parts(kind: TakagiType, n: Option<usize>, p: Option<usize>, q: Option<usize>) -> Result<Self> {
        match kind {
            TakagiType::A1 => Self::a1(n.ok_or_else(|| Error::Parameter("type A1 needs n".into()))?),
            TakagiType::A2 => {
                let (p, q) = match (p, q, n) {
                    (Some(p), Some(q), _) => (p, q),
                    (Some(p), None, Some(n)) if n > p + 1 => (p, n - p - 1),
                    (None, Some(q), Some(n)) if n > q + 1 => (n - q - 1, q),
                    _ => return Err(Error::Parameter("type A2 needs p and q (or n with one of them)".into())),
                };
                let s = Self::a2(p, q)?;
                if let Some(n) = n {
                    if n != s.n {
                        return Err(Error::Parameter(format!("type A2 needs p + q = n - 1, got p={p}, q={q}, n={n}")));
                    }
                }
                Ok(s)
            }
        }
    }

    /// Real dimension `2n - 1` of the hypersurface.
    pub fn dimension(&self) -> usize {
        2 * self.n - 1
    }

    /// `(A, B, C)` with the biharmonic condition `A t² - B t + C = 0`, `t = tan²u`.
    pub fn quadratic(&self, c: f64) -> (f64, f64, f64) {
        let rr = radius_sq(c);
        let b = 2.0 + cmc_rhs(c, self.n) * rr;
        match self.kind {
            TakagiType::A1 => (1.0, b, (2 * self.n - 1) as f64),
            TakagiType::A2 => ((2 * self.p + 1) as f64, b, (2 * self.q + 1) as f64),
        }
    }

    /// Discriminant polynomial in `c` whose sign decides whether real roots exist.
    /// Equal to `(c+3)²(B² - 4AC)/4`.
    pub fn discriminant(&self, c: f64) -> f64 {
        let n = self.n as f64;
        match self.kind {
            TakagiType::A1 => {
                c * c * (n * n + 2.0 * n + 5.0) + 2.0 * c * (3.0 * n * n - 2.0 * n - 1.0) + 9.0 * n * n - 30.0 * n + 13.0
            }
            TakagiType::A2 => {
                let lin = c * n + 2.0 * c + 3.0 * n - 2.0;
                let pq = ((2 * self.p + 1) * (2 * self.q + 1)) as f64;
                lin * lin - pq * (c + 3.0) * (c + 3.0)
            }
        }
    }
}

impl fmt::Display for TakagiShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            TakagiType::A1 => write!(f, "A1(n={})", self.n),
            TakagiType::A2 => write!(f, "A2(p={}, q={})", self.p, self.q),
        }
    }
}

/// `r²` with `1/r² = (c+3)/4`.
pub fn radius_sq(c: f64) -> f64 {
    4.0 / (c + 3.0)
}

/// Right-hand side `(c(n+1)+3n-5)/2` of the CMC criterion.
pub fn cmc_rhs(c: f64, n: usize) -> f64 {
    let n = n as f64;
    (c * (n + 1.0) + 3.0 * n - 5.0) / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TakagiHypersurface {
    pub shape: TakagiShape,
    pub u: f64,
    pub c: f64,
    pub r: f64,
}

impl TakagiHypersurface {
    pub fn new(shape: TakagiShape, u: f64, c: f64) -> Result<Self> {
        if !(c > -3.0) || !c.is_finite() {
            return Err(Error::Parameter(format!("holomorphic curvature needs c > -3, got {c}")));
        }
        if !(u > 0.0 && u < FRAC_PI_2) {
            return Err(Error::Parameter(format!("u must lie in (0, pi/2), got {u}")));
        }
        Ok(Self { shape, u, c, r: radius_sq(c).sqrt() })
    }

    /// Hypersurface at `u = arctan √t`.
    pub fn from_tan2u(shape: TakagiShape, tan2u: f64, c: f64) -> Result<Self> {
        if !(tan2u > 0.0) || !tan2u.is_finite() {
            return Err(Error::Parameter(format!("tan^2 u must be positive, got {tan2u}")));
        }
        Self::new(shape, tan2u.sqrt().atan(), c)
    }

    pub fn tan2u(&self) -> f64 {
        self.u.tan().powi(2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrincipalCurvature {
    pub value: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HopfSpectrum {
    pub curvatures: Vec<PrincipalCurvature>,
    /// `‖B̄‖² = Σ mult·λ²`.
    pub norm_b_sq: f64,
    /// Signed `H̄ = Σ mult·λ / (2n-1)`.
    pub mean_curvature: f64,
    pub dimension: usize,
}

/// Principal curvatures of a type A1/A2 hypersurface with `‖B̄‖²` and `H̄`.
pub fn spectrum(h: &TakagiHypersurface) -> Result<HopfSpectrum> {
    if h.u < SINGULAR_MARGIN || h.u > FRAC_PI_2 - SINGULAR_MARGIN {
        return Err(Error::SingularSpectrum(format!("u = {} is too close to 0 or pi/2", h.u)));
    }
    let s = h.shape;
    let inv_r = 1.0 / h.r;
    let lambda2 = inv_r / h.u.tan();
    let a = 2.0 * inv_r / (2.0 * h.u).tan();
    let curvatures = match s.kind {
        TakagiType::A1 => vec![
            PrincipalCurvature { value: lambda2, multiplicity: 2 * s.n - 2 },
            PrincipalCurvature { value: a, multiplicity: 1 },
        ],
        TakagiType::A2 => vec![
            PrincipalCurvature { value: -inv_r * h.u.tan(), multiplicity: 2 * s.p },
            PrincipalCurvature { value: lambda2, multiplicity: 2 * s.q },
            PrincipalCurvature { value: a, multiplicity: 1 },
        ],
    };
    let dimension = s.dimension();
    let norm_b_sq = curvatures.iter().map(|k| k.multiplicity as f64 * k.value * k.value).sum();
    let trace: f64 = curvatures.iter().map(|k| k.multiplicity as f64 * k.value).sum();
    Ok(HopfSpectrum { curvatures, norm_b_sq, mean_curvature: trace / dimension as f64, dimension })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CmcCheck {
    pub satisfied: bool,
    /// False when the right-hand side is `≤ 0`: no non-totally-geodesic solution can exist.
    pub satisfiable: bool,
    pub rhs: f64,
    pub residual: f64,
}

/// `‖B̄‖² = (c(n+1)+3n-5)/2` within [`CMC_TOL`].
pub fn cmc_criterion(c: f64, n: usize, norm_b_sq: f64) -> CmcCheck {
    let rhs = cmc_rhs(c, n);
    let residual = (norm_b_sq - rhs).abs();
    let satisfiable = rhs > 0.0;
    CmcCheck { satisfied: satisfiable && residual < CMC_TOL, satisfiable, rhs, residual }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HopfVerdict {
    ProperBiharmonic,
    /// Satisfies the biharmonic equation with `H̄ = 0`, so the cylinder is harmonic.
    Minimal,
}

impl fmt::Display for HopfVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HopfVerdict::ProperBiharmonic => "proper-biharmonic",
            HopfVerdict::Minimal => "minimal",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HopfRoot {
    pub index: usize,
    pub tan2u: f64,
    pub u: f64,
    pub norm_b_sq: f64,
    pub mean_curvature: f64,
    pub cmc_residual: f64,
    pub verdict: HopfVerdict,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HopfSolution {
    pub shape: TakagiShape,
    pub c: f64,
    pub discriminant: f64,
    pub threshold: f64,
    pub roots: Vec<HopfRoot>,
    pub notes: Vec<String>,
}

impl HopfSolution {
    pub fn proper_roots(&self) -> impl Iterator<Item = &HopfRoot> {
        self.roots.iter().filter(|r| r.verdict == HopfVerdict::ProperBiharmonic)
    }
}

/// Closed-form roots `tan²u = [n + (2c-2)/(c+3) ± √D/(c+3)] / A`, smaller first,
/// or `None` when `D < 0`.
pub fn closed_form_roots(shape: &TakagiShape, c: f64) -> Option<(f64, f64)> {
    let d = shape.discriminant(c);
    if d < 0.0 {
        return None;
    }
    let n = shape.n as f64;
    let lead = n + (2.0 * c - 2.0) / (c + 3.0);
    let half = d.sqrt() / (c + 3.0);
    let a = match shape.kind {
        TakagiType::A1 => 1.0,
        TakagiType::A2 => (2 * shape.p + 1) as f64,
    };
    Some(((lead - half) / a, (lead + half) / a))
}

/// Roots of the biharmonic condition in `tan²u`, labeled proper or minimal.
pub fn solve_biharmonic_u(shape: &TakagiShape, c: f64) -> Result<HopfSolution> {
    if !(c > -3.0) || !c.is_finite() {
        return Err(Error::Parameter(format!("holomorphic curvature needs c > -3, got {c}")));
    }
    let discriminant = shape.discriminant(c);
    let threshold = existence_threshold(shape);
    let mut sol = HopfSolution { shape: *shape, c, discriminant, threshold, roots: Vec::new(), notes: Vec::new() };
    let rhs = cmc_rhs(c, shape.n);
    if rhs <= 0.0 {
        sol.notes.push(format!("(c(n+1)+3n-5)/2 = {rhs} <= 0: no proper-biharmonic CMC cylinder"));
        return Ok(sol);
    }
    let Some((lo, hi)) = closed_form_roots(shape, c) else {
        sol.notes.push(format!("discriminant {discriminant:e} < 0: c is below the existence threshold {threshold}"));
        return Ok(sol);
    };
    let mut ts = vec![lo];
    if hi - lo > 1e-12 * hi.abs().max(1.0) {
        ts.push(hi);
    }
    for t in ts.into_iter().filter(|t| *t > 0.0) {
        let h = TakagiHypersurface::from_tan2u(*shape, t, c)?;
        let spec = spectrum(&h)?;
        let cmc = cmc_criterion(c, shape.n, spec.norm_b_sq);
        let verdict = if spec.mean_curvature.abs() > MINIMAL_TOL {
            HopfVerdict::ProperBiharmonic
        } else {
            HopfVerdict::Minimal
        };
        let mut note = None;
        if !cmc.satisfied {
            note = Some(format!("spectrum misses the CMC criterion by {:e}", cmc.residual));
        } else if verdict == HopfVerdict::Minimal {
            note = Some(if shape.kind == TakagiType::A2 && shape.p == shape.q && (t - 1.0).abs() < 1e-9 {
                "rejected: tan^2 u = 1 with p = q is minimal".to_string()
            } else {
                "excluded: H = 0, the cylinder is harmonic".to_string()
            });
        }
        sol.roots.push(HopfRoot {
            index: sol.roots.len(),
            tan2u: t,
            u: h.u,
            norm_b_sq: spec.norm_b_sq,
            mean_curvature: spec.mean_curvature,
            cmc_residual: cmc.residual,
            verdict,
            note,
        });
    }
    if (c - 1.0).abs() < 1e-12 {
        sol.notes.push("c = 1: only tan^2 u = 1 can be proper biharmonic (and for A2 only if p != q)".into());
    }
    if sol.roots.is_empty() {
        sol.notes.push("no positive root".into());
    }
    Ok(sol)
}

/// Smallest `c` for which the biharmonic quadratic has real roots.
/// Above it every `c ≠ 1` admits proper-biharmonic roots.
pub fn existence_threshold(shape: &TakagiShape) -> f64 {
    let n = shape.n as f64;
    match shape.kind {
        TakagiType::A1 => (-3.0 * n * n + 2.0 * n + 1.0 + 8.0 * (2.0 * n - 1.0).sqrt()) / (n * n + 2.0 * n + 5.0),
        TakagiType::A2 => {
            let d = shape.p as f64 - shape.q as f64;
            let pq = ((2 * shape.p + 1) * (2 * shape.q + 1)) as f64;
            (-3.0 * d * d - 4.0 * n + 4.0 + 8.0 * pq.sqrt()) / (d * d + 4.0 * n + 4.0)
        }
    }
}

/// Upper bound `(5-3n)/(n+1)` of the range of `c` with no proper-biharmonic CMC cylinders.
pub fn non_existence_bound(n: usize) -> f64 {
    let n = n as f64;
    (5.0 - 3.0 * n) / (n + 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Hopf3Verdict {
    ProperBiharmonic,
    /// `c ≤ 1`: biharmonic only when minimal.
    MinimalOnly,
    NotProperBiharmonic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hopf3Report {
    pub verdict: Hopf3Verdict,
    pub residual: f64,
}

/// Hopf cylinder over a curve of constant curvature `κ̄` in a surface of curvature `c + 3`:
/// proper biharmonic iff `c > 1` and `κ̄² = c - 1`.
pub fn hopf3_criterion(c: f64, kappa_bar: f64) -> Hopf3Report {
    let residual = (kappa_bar * kappa_bar - (c - 1.0)).abs();
    let verdict = if c <= 1.0 {
        Hopf3Verdict::MinimalOnly
    } else if residual < HOPF3_TOL {
        Hopf3Verdict::ProperBiharmonic
    } else {
        Hopf3Verdict::NotProperBiharmonic
    };
    Hopf3Report { verdict, residual }
}

/// One CSV row per root found on the scan grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    #[serde(rename = "type")]
    pub kind: TakagiType,
    pub c: f64,
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub root_index: usize,
    pub tan2u: f64,
    pub u: f64,
    #[serde(rename = "normB2")]
    pub norm_b2: f64,
    #[serde(rename = "H")]
    pub h: f64,
    pub verdict: HopfVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub points: usize,
    pub points_with_roots: usize,
    pub proper_roots: usize,
    pub minimal_roots: usize,
    pub max_cmc_residual: f64,
    pub c_range: (f64, f64),
    pub shapes: Vec<TakagiShape>,
}

/// Solves every `(shape, c)` pair in parallel; rows come back in grid order.
pub fn scan(shapes: &[TakagiShape], c_values: &[f64]) -> Result<(Vec<ScanRow>, ScanSummary)> {
    let grid: Vec<(TakagiShape, f64)> =
        shapes.iter().flat_map(|s| c_values.iter().map(move |&c| (*s, c))).collect();
    let solved: Vec<HopfSolution> = grid.par_iter().map(|(s, c)| solve_biharmonic_u(s, *c)).collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut summary = ScanSummary {
        points: solved.len(),
        points_with_roots: 0,
        proper_roots: 0,
        minimal_roots: 0,
        max_cmc_residual: 0.0,
        c_range: c_values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &c| (a.min(c), b.max(c))),
        shapes: shapes.to_vec(),
    };
    for sol in &solved {
        if !sol.roots.is_empty() {
            summary.points_with_roots += 1;
        }
        for r in &sol.roots {
            match r.verdict {
                HopfVerdict::ProperBiharmonic => summary.proper_roots += 1,
                HopfVerdict::Minimal => summary.minimal_roots += 1,
            }
            summary.max_cmc_residual = summary.max_cmc_residual.max(r.cmc_residual);
            rows.push(ScanRow {
                kind: sol.shape.kind,
                c: sol.c,
                n: sol.shape.n,
                p: sol.shape.p,
                q: sol.shape.q,
                root_index: r.index,
                tan2u: r.tan2u,
                u: r.u,
                norm_b2: r.norm_b_sq,
                h: r.mean_curvature,
                verdict: r.verdict,
            });
        }
    }
    Ok((rows, summary))
}

/// Writes scan rows with header `type,c,n,p,q,root_index,tan2u,u,normB2,H,verdict`.
pub fn write_scan_csv<W: Write>(rows: &[ScanRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["type", "c", "n", "p", "q", "root_index", "tan2u", "u", "normB2", "H", "verdict"])
        .map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
    for r in rows {
        w.write_record([
            r.kind.to_string(),
            r.c.to_string(),
            r.n.to_string(),
            r.p.to_string(),
            r.q.to_string(),
            r.root_index.to_string(),
            r.tan2u.to_string(),
            r.u.to_string(),
            r.norm_b2.to_string(),
            r.h.to_string(),
            r.verdict.to_string(),
        ])
        .map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
    }
    w.flush().map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_4;

    /// `t·(‖B̄(t)‖² - rhs)·(c+3)/4`, quadratic in `t`, evaluated through the spectrum only.
    fn scaled_condition(shape: TakagiShape, c: f64) -> impl Fn(f64) -> f64 {
        move |t| {
            let h = TakagiHypersurface::from_tan2u(shape, t, c).unwrap();
            let s = spectrum(&h).unwrap();
            t * (s.norm_b_sq - cmc_rhs(c, shape.n)) / radius_sq(c)
        }
    }

    fn oracle_roots(shape: TakagiShape, c: f64) -> Vec<f64> {
        let [a, b, cc] = oracle::quadratic_through(scaled_condition(shape, c), [0.5, 1.0, 2.0]);
        oracle::quadratic_roots(a, b, cc).into_iter().filter(|t| *t > 0.0).collect()
    }

    /// Largest zero of the discriminant in `c`, located by scanning.
    fn numeric_threshold(shape: TakagiShape) -> f64 {
        let zs = oracle::scan_roots(|c| shape.discriminant(c), -2.999, 5.0, 20_001);
        *zs.last().unwrap()
    }

    fn arb_shape() -> impl Strategy<Value = TakagiShape> {
        prop_oneof![
            (2usize..12).prop_map(|n| TakagiShape::a1(n).unwrap()),
            (1usize..6, 1usize..6).prop_map(|(p, q)| TakagiShape::a2(p, q).unwrap()),
        ]
    }

    #[test]
    fn a1_spectrum_at_quarter_turn() {
        let h = TakagiHypersurface::new(TakagiShape::a1(2).unwrap(), FRAC_PI_4, 1.0).unwrap();
        let s = spectrum(&h).unwrap();
        assert_relative_eq!(h.r, 1.0);
        assert_relative_eq!(s.curvatures[0].value, 1.0, epsilon = 1e-15);
        assert_eq!(s.curvatures[0].multiplicity, 2);
        assert!(s.curvatures[1].value.abs() < 1e-15);
        assert_relative_eq!(s.norm_b_sq, 2.0, epsilon = 1e-14);
        assert_relative_eq!(s.mean_curvature, 2.0 / 3.0, epsilon = 1e-14);
        assert_eq!(s.curvatures.iter().map(|k| k.multiplicity).sum::<usize>(), 3);
    }

    #[test]
    fn a1_minimal_at_tan2u_2n_minus_1() {
        for n in 2..8 {
            let shape = TakagiShape::a1(n).unwrap();
            // Independent: solve (2n-2)cot u + 2cot 2u = 0 numerically.
            let u0 = oracle::bisect(|u| (2 * n - 2) as f64 / u.tan() + 2.0 / (2.0 * u).tan(), FRAC_PI_4, 1.5);
            let h = TakagiHypersurface::from_tan2u(shape, (2 * n - 1) as f64, 0.3).unwrap();
            assert!((h.u - u0).abs() < 1e-12);
            assert!(spectrum(&h).unwrap().mean_curvature.abs() < 1e-12);
        }
    }

    #[test]
    fn a2_symmetric_is_minimal_at_quarter_turn() {
        for (p, c) in [(1, 1.0), (2, -1.5), (3, 4.0)] {
            let h = TakagiHypersurface::new(TakagiShape::a2(p, p).unwrap(), FRAC_PI_4, c).unwrap();
            let s = spectrum(&h).unwrap();
            assert_relative_eq!(s.curvatures[0].value, -1.0 / h.r, epsilon = 1e-14);
            assert_relative_eq!(s.curvatures[1].value, 1.0 / h.r, epsilon = 1e-14);
            assert!(s.mean_curvature.abs() < 1e-15);
        }
    }

    #[test]
    fn singular_and_invalid_data() {
        let s = TakagiShape::a1(2).unwrap();
        let h = TakagiHypersurface::new(s, 1e-10, 1.0).unwrap();
        assert!(matches!(spectrum(&h), Err(Error::SingularSpectrum(_))));
        assert!(TakagiHypersurface::new(s, 0.0, 1.0).is_err());
        assert!(TakagiHypersurface::new(s, 0.5, -3.0).is_err());
        assert!(TakagiShape::a1(1).is_err());
        assert!(TakagiShape::a2(0, 2).is_err());
        assert!(TakagiShape::from_parts(TakagiType::A2, Some(4), Some(1), Some(1)).is_err());
        assert_eq!(TakagiShape::from_parts(TakagiType::A2, Some(4), Some(1), None).unwrap().q, 2);
    }

    #[test]
    fn cmc_criterion_examples() {
        assert!(cmc_criterion(1.0, 2, 2.0).satisfied);
        for n in 2..7 {
            let chk = cmc_criterion(-3.0, n, 1.0);
            assert_eq!(chk.rhs, -4.0);
            assert!(!chk.satisfiable);
            assert!(cmc_rhs(non_existence_bound(n), n).abs() < 1e-14);
        }
    }

    #[test]
    fn a1_c1_n2_roots() {
        let shape = TakagiShape::a1(2).unwrap();
        assert_relative_eq!(shape.discriminant(1.0), 16.0, epsilon = 1e-12);
        let sol = solve_biharmonic_u(&shape, 1.0).unwrap();
        assert_eq!(sol.roots.len(), 2);
        assert_relative_eq!(sol.roots[0].tan2u, 1.0, epsilon = 1e-14);
        assert_eq!(sol.roots[0].verdict, HopfVerdict::ProperBiharmonic);
        assert_relative_eq!(sol.roots[0].norm_b_sq, 2.0, epsilon = 1e-14);
        assert_relative_eq!(sol.roots[0].u.cos(), std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_relative_eq!(sol.roots[1].tan2u, 3.0, epsilon = 1e-14);
        assert_eq!(sol.roots[1].verdict, HopfVerdict::Minimal);
        assert!(sol.roots[1].mean_curvature.abs() < 1e-12);
    }

    #[test]
    fn a2_c1_symmetric_root_rejected() {
        let sol = solve_biharmonic_u(&TakagiShape::a2(1, 1).unwrap(), 1.0).unwrap();
        assert_eq!(sol.proper_roots().count(), 0);
        assert_eq!(sol.roots.len(), 1);
        assert!(sol.roots[0].note.as_deref().unwrap().contains("p = q"));
        let sol = solve_biharmonic_u(&TakagiShape::a2(1, 2).unwrap(), 1.0).unwrap();
        let proper: Vec<_> = sol.proper_roots().collect();
        assert_eq!(proper.len(), 1);
        assert_relative_eq!(proper[0].tan2u, 1.0, epsilon = 1e-13);
    }

    #[test]
    fn thresholds_match_discriminant_zero() {
        let s = TakagiShape::a1(2).unwrap();
        assert_relative_eq!(existence_threshold(&s), (-7.0 + 8.0 * 3f64.sqrt()) / 13.0, epsilon = 1e-15);
        assert!((existence_threshold(&s) - 0.5274).abs() < 1e-4);
        for n in 2..=10 {
            let s = TakagiShape::a1(n).unwrap();
            let c = existence_threshold(&s);
            assert!(c.is_finite() && c < 1.0);
            assert!((c - numeric_threshold(s)).abs() < 1e-9);
        }
        for (p, q) in [(1, 1), (1, 2), (2, 1), (1, 4), (3, 3), (5, 2)] {
            let s = TakagiShape::a2(p, q).unwrap();
            assert!((existence_threshold(&s) - numeric_threshold(s)).abs() < 1e-9, "{s}");
        }
        let below = solve_biharmonic_u(&s, existence_threshold(&s) - 1e-3).unwrap();
        assert!(below.roots.is_empty());
    }

    #[test]
    fn non_existence_region_is_empty() {
        for n in 2..=6 {
            for k in 0..10 {
                let c = -2.99 + (non_existence_bound(n) + 2.99) * k as f64 / 9.0;
                assert!(solve_biharmonic_u(&TakagiShape::a1(n).unwrap(), c).unwrap().roots.is_empty());
                assert!(solve_biharmonic_u(&TakagiShape::a2(1, n - 1).unwrap(), c).unwrap().roots.is_empty());
            }
        }
    }

    #[test]
    fn hopf3_examples() {
        assert_eq!(hopf3_criterion(5.0, 2.0).verdict, Hopf3Verdict::ProperBiharmonic);
        assert_eq!(hopf3_criterion(1.0, 0.7).verdict, Hopf3Verdict::MinimalOnly);
        assert_eq!(hopf3_criterion(-2.0, 0.0).verdict, Hopf3Verdict::MinimalOnly);
        assert_eq!(hopf3_criterion(5.0, 1.0).verdict, Hopf3Verdict::NotProperBiharmonic);
    }

    #[test]
    fn scan_is_ordered_and_csv_has_header() {
        let shapes = [TakagiShape::a1(2).unwrap(), TakagiShape::a2(1, 2).unwrap()];
        let cs: Vec<f64> = (0..40).map(|k| -2.5 + 0.2 * k as f64).collect();
        let (rows, summary) = scan(&shapes, &cs).unwrap();
        assert_eq!(summary.points, 80);
        assert!(summary.max_cmc_residual < 1e-9);
        let keys: Vec<_> = rows.iter().map(|r| (r.kind as u8, r.p, (r.c * 10.0).round() as i64, r.root_index)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        let mut buf = Vec::new();
        write_scan_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("type,c,n,p,q,root_index,tan2u,u,normB2,H,verdict\n"));
    }

    #[test]
    fn types_b_to_e_are_informational() {
        assert!(other_type_status(OtherTakagiType::C).contains("not verified"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn closed_form_matches_independent_quadratic(shape in arb_shape(), c in -2.9f64..8.0) {
            let sol = solve_biharmonic_u(&shape, c).unwrap();
            let independent = oracle_roots(shape, c);
            let mine: Vec<f64> = sol.roots.iter().map(|r| r.tan2u).collect();
            if shape.discriminant(c) > 1e-6 {
                prop_assert_eq!(mine.len(), independent.len());
                for (a, b) in mine.iter().zip(&independent) {
                    prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "{} vs {}", a, b);
                }
            }
            for r in &sol.roots {
                prop_assert!(r.cmc_residual < 1e-8);
                prop_assert_eq!(r.verdict == HopfVerdict::Minimal, (c - 1.0).abs() < 1e-9);
            }
        }

        #[test]
        fn brute_force_u_grid_finds_only_returned_roots(shape in arb_shape(), c in -2.9f64..8.0) {
            let sol = solve_biharmonic_u(&shape, c).unwrap();
            let rhs = cmc_rhs(c, shape.n);
            let f = |u: f64| {
                let h = TakagiHypersurface::new(shape, u, c).unwrap();
                spectrum(&h).unwrap().norm_b_sq - rhs
            };
            for u in oracle::scan_roots(f, 1e-4, FRAC_PI_2 - 1e-4, 100_000) {
                let t = u.tan().powi(2);
                prop_assert!(sol.roots.iter().any(|r| (r.tan2u - t).abs() < 1e-6 * t.max(1.0)), "stray root {}", t);
            }
        }
    }
}
