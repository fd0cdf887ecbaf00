//! Tension and bitension of Legendre curves, evaluated directly from the
//! connection and curvature and independently through the Frenet expansion.

use std::io;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::curves::{self, require_range, FrenetData, ParamCurve};
use crate::diff::{self, Sampled, DEFAULT_RICHARDSON_LEVELS};
use crate::error::{Error, Result};
use crate::models::{ModelDescriptor, SpaceFormModel};
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BiharmonicVerdict {
    Harmonic,
    ProperBiharmonic,
    NotBiharmonic,
    Indeterminate,
}

/// `τ(γ) = ∇_T T` on the curve's sample grid.
pub fn tension(curve: &ParamCurve) -> Result<Sampled<DVector<f64>>> {
    let s = curve.samples();
    let t = s.velocity()?;
    s.covariant_derivative(&t, &t)
}

/// `τ₂(γ) = ∇³_T T - R(T, ∇_T T)T` from three nested covariant derivatives
/// and the closed-form curvature operator.
///
/// The expansion is only valid for Legendre curves, so inputs with
/// `max |η(T)|` above `gate` are rejected.
pub fn bitension_direct_gated(curve: &ParamCurve, gate: f64) -> Result<Sampled<DVector<f64>>> {
    let residual = curves::legendre_residual(curve)?;
    if residual > gate {
        return Err(Error::NonLegendre { residual });
    }
    let s = curve.samples();
    let m = s.model;
    let t = s.velocity()?;
    let a = s.covariant_derivative(&t, &t)?;
    let b = s.covariant_derivative(&t, &a)?;
    let c = s.covariant_derivative(&t, &b)?;
    Ok(c.map_indexed(|k, v| v - m.curvature_at(&s.points[k], t.at(k), a.at(k), t.at(k))))
}

/// [`bitension_direct_gated`] with the default Legendre gate.
pub fn bitension_direct(curve: &ParamCurve) -> Result<Sampled<DVector<f64>>> {
    bitension_direct_gated(curve, crate::tolerances::LEGENDRE_GATE)
}

/// Frenet expansion of the bitension field
///
/// `(-3κ₁κ₁')E₁ + (κ₁'' - κ₁³ - κ₁κ₂² + (c+3)κ₁/4)E₂ + (2κ₁'κ₂ + κ₁κ₂')E₃
///  + κ₁κ₂κ₃E₄ + 3(c-1)κ₁/4 · g(E₂,φT) φT`.
///
/// Curvatures and frame vectors beyond the measured order count as zero.
pub fn bitension_frenet(fd: &FrenetData, c: f64) -> Result<Sampled<DVector<f64>>> {
    let m = fd.model;
    let e1 = &fd.frames[0];
    if fd.order < 2 {
        return Ok(e1.map(|v| DVector::zeros(v.len())));
    }
    let h = fd.h;
    let lv = DEFAULT_RICHARDSON_LEVELS;
    let k1 = &fd.curvatures[0];
    let k1p = diff::derivative(k1, h, lv)?;
    let k1pp = diff::derivative(&k1p, h, lv)?;
    let k2 = fd.curvatures.get(1);
    let k2p = k2.map(|k| diff::derivative(k, h, lv)).transpose()?;
    let k3 = fd.curvatures.get(2);
    let e2 = &fd.frames[1];
    let e3 = fd.frames.get(2);
    let e4 = fd.frames.get(3);

    let mut ranges = vec![e1.range(), e2.range(), k1pp.range()];
    ranges.extend(k2p.iter().map(|k| k.range()));
    ranges.extend(k3.iter().map(|k| k.range()));
    ranges.extend(e4.iter().map(|e| e.range()));
    let range = diff::common_range(ranges);
    let values = range
        .clone()
        .map(|k| {
            let p = &fd.points[k];
            let (x1, x1p, x1pp) = (*k1.at(k), *k1p.at(k), *k1pp.at(k));
            let x2 = k2.map_or(0.0, |s| *s.at(k));
            let x2p = k2p.as_ref().map_or(0.0, |s| *s.at(k));
            let x3 = k3.map_or(0.0, |s| *s.at(k));
            let t = e1.at(k);
            let phit = m.phi_at(p, t);
            let mut v = t * (-3.0 * x1 * x1p)
                + e2.at(k) * (x1pp - x1.powi(3) - x1 * x2 * x2 + (c + 3.0) * x1 / 4.0)
                + &phit * (0.75 * (c - 1.0) * x1 * m.g_at(p, e2.at(k), &phit));
            if let Some(e3) = e3 {
                v += e3.at(k) * (2.0 * x1p * x2 + x1 * x2p);
            }
            if let Some(e4) = e4 {
                v += e4.at(k) * (x1 * x2 * x3);
            }
            v
        })
        .collect();
    Ok(Sampled::new(range.start, values))
}

/// Verdict from residual maxima.
///
/// Harmonic below `tol`; proper-biharmonic when both evaluators are below
/// `tol` and the tension is at least `10·tol`; not biharmonic when both
/// evaluators exceed `10·tol`; indeterminate otherwise.
pub fn decide(tension_max: f64, direct_max: f64, frenet_max: f64, tol: f64) -> BiharmonicVerdict {
    if tension_max < tol {
        BiharmonicVerdict::Harmonic
    } else if direct_max < tol && frenet_max < tol && tension_max >= 10.0 * tol {
        BiharmonicVerdict::ProperBiharmonic
    } else if direct_max > 10.0 * tol && frenet_max > 10.0 * tol {
        BiharmonicVerdict::NotBiharmonic
    } else {
        BiharmonicVerdict::Indeterminate
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub s: f64,
    pub tension: f64,
    pub bitension_direct: f64,
    pub bitension_frenet: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiharmonicReport {
    pub model: ModelDescriptor,
    pub order: usize,
    pub tension_norm_max: f64,
    pub bitension_direct_max: f64,
    pub bitension_frenet_max: f64,
    /// `max ‖τ₂_direct - τ₂_frenet‖`.
    pub evaluator_gap_max: f64,
    pub legendre_residual: f64,
    pub frenet_residual: f64,
    pub tolerance: f64,
    pub tol_order: f64,
    pub verdict: BiharmonicVerdict,
    pub warnings: Vec<String>,
    pub per_sample: Vec<SampleRow>,
}

impl BiharmonicReport {
    pub fn write_csv<W: io::Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        for row in &self.per_sample {
            wr.serialize(row).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        }
        wr.flush().map_err(|e| Error::InvalidArgument(e.to_string()))
    }
}

/// Everything computed for a verdict, kept for callers that need the fields.
#[derive(Debug, Clone)]
pub struct BitensionAnalysis {
    pub frenet: FrenetData,
    pub tension: Sampled<DVector<f64>>,
    pub direct: Sampled<DVector<f64>>,
    pub expansion: Sampled<DVector<f64>>,
    pub report: BiharmonicReport,
}

/// Runs both evaluators over the interior of the domain.
pub fn analyze(curve: &ParamCurve, tol: Tolerances) -> Result<BitensionAnalysis> {
    let m: SpaceFormModel = *curve.model();
    let threshold = tol.bitension_for(&m);
    let legendre = curves::legendre_residual(curve)?;
    let fd = curves::frenet(curve, tol.tol_order)?;
    let tension_field = tension(curve)?;
    let direct = bitension_direct_gated(curve, tol.legendre_gate)?;
    let expansion = bitension_frenet(&fd, m.c())?;
    let interior = fd.interior.clone();
    for f in [&tension_field, &direct, &expansion] {
        require_range(&interior, &f.range())?;
    }
    let mut per_sample = Vec::with_capacity(interior.len());
    let (mut tmax, mut dmax, mut fmax, mut gap) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for k in interior {
        let p = &fd.points[k];
        let tn = m.norm_at(p, tension_field.at(k));
        let dn = m.norm_at(p, direct.at(k));
        let fnn = m.norm_at(p, expansion.at(k));
        gap = gap.max(m.norm_at(p, &(direct.at(k) - expansion.at(k))));
        tmax = tmax.max(tn);
        dmax = dmax.max(dn);
        fmax = fmax.max(fnn);
        per_sample.push(SampleRow {
            s: fd.s(k),
            tension: tn,
            bitension_direct: dn,
            bitension_frenet: fnn,
        });
    }
    let verdict = decide(tmax, dmax, fmax, threshold);
    let mut warnings = fd.warnings.clone();
    if verdict == BiharmonicVerdict::Indeterminate {
        warnings.push(format!(
            "evaluators disagree or sit between tol and 10 tol (direct {dmax:e}, frenet {fmax:e}, tol {threshold:e})"
        ));
    }
    let report = BiharmonicReport {
        model: m.descriptor(),
        order: fd.order,
        tension_norm_max: tmax,
        bitension_direct_max: dmax,
        bitension_frenet_max: fmax,
        evaluator_gap_max: gap,
        legendre_residual: legendre,
        frenet_residual: fd.frenet_residual,
        tolerance: threshold,
        tol_order: tol.tol_order,
        verdict,
        warnings,
        per_sample,
    };
    Ok(BitensionAnalysis {
        frenet: fd,
        tension: tension_field,
        direct,
        expansion,
        report,
    })
}

/// Biharmonicity verdict with the model's threshold from `tol`.
pub fn verdict(curve: &ParamCurve, tol: Tolerances) -> Result<BiharmonicReport> {
    Ok(analyze(curve, tol)?.report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::{circle_curve, helix_curve, legendre_geodesic, small_circle_curve};
    use crate::curves::{frenet, DEFAULT_TOL_ORDER};

    fn max_norm(curve: &ParamCurve, f: &Sampled<DVector<f64>>) -> f64 {
        let s = curve.samples();
        let interior = s.interior();
        interior
            .map(|k| curve.model().norm_at(&s.points[k], f.at(k)))
            .fold(0.0, f64::max)
    }

    #[test]
    fn geodesic_is_harmonic() {
        let c = legendre_geodesic(2).unwrap();
        assert!(max_norm(&c, &tension(&c).unwrap()) < 1e-8);
        assert!(max_norm(&c, &bitension_direct(&c).unwrap()) < 1e-8);
        let r = verdict(&c, Tolerances::default()).unwrap();
        assert_eq!(r.verdict, BiharmonicVerdict::Harmonic);
    }

    #[test]
    fn circle_is_proper_biharmonic() {
        let c = circle_curve(2).unwrap();
        assert!((max_norm(&c, &tension(&c).unwrap()) - 1.0).abs() < 1e-6);
        assert!(max_norm(&c, &bitension_direct(&c).unwrap()) < 1e-5);
        let fd = frenet(&c, DEFAULT_TOL_ORDER).unwrap();
        assert!(max_norm(&c, &bitension_frenet(&fd, 1.0).unwrap()) < 1e-6);
        let r = verdict(&c, Tolerances::default()).unwrap();
        assert_eq!(r.verdict, BiharmonicVerdict::ProperBiharmonic);
    }

    #[test]
    fn helix_is_proper_biharmonic() {
        let r = verdict(&helix_curve(2, 0.6).unwrap(), Tolerances::default()).unwrap();
        assert_eq!(r.verdict, BiharmonicVerdict::ProperBiharmonic, "{r:?}");
    }

    #[test]
    fn small_circle_is_not_biharmonic() {
        let c = small_circle_curve(2, 0.5).unwrap();
        let r = verdict(&c, Tolerances::default()).unwrap();
        assert!(r.bitension_direct_max >= 0.3);
        // (κ₁ - κ₁³) at κ₁ = 1/2
        assert!((r.bitension_direct_max - 0.375).abs() < 1e-6);
        assert_eq!(r.verdict, BiharmonicVerdict::NotBiharmonic);
    }

    #[test]
    fn non_legendre_input_is_rejected() {
        let m = SpaceFormModel::unit_sphere(2).unwrap();
        let c = crate::constructors::xi_orbit(&m, 8.0).unwrap();
        assert!(matches!(bitension_direct(&c), Err(Error::NonLegendre { .. })));
    }

    #[test]
    fn flat_circle_is_never_biharmonic() {
        // c = -3 removes the (c+3)κ₁/4 term: the E₂ coefficient is -κ₁³.
        use crate::constructors::{integrate_frenet_ode, synthesize_frame, FrameRequest};
        let m = SpaceFormModel::flat(2).unwrap();
        let frame = synthesize_frame(&m, FrameRequest::CaseTwoCircle).unwrap();
        let c = integrate_frenet_ode(&m, &frame, &[0.7], 10.0).unwrap();
        let r = verdict(&c, Tolerances::default()).unwrap();
        assert!((r.bitension_frenet_max - 0.343).abs() < 1e-4, "{}", r.bitension_frenet_max);
        assert!(r.evaluator_gap_max < 1e-4);
        assert_eq!(r.verdict, BiharmonicVerdict::NotBiharmonic);
    }

    #[test]
    fn decision_table() {
        use BiharmonicVerdict::*;
        assert_eq!(decide(1e-7, 1e-7, 1e-7, 1e-5), Harmonic);
        assert_eq!(decide(1.0, 1e-7, 1e-7, 1e-5), ProperBiharmonic);
        assert_eq!(decide(1.0, 0.3, 0.3, 1e-5), NotBiharmonic);
        assert_eq!(decide(1.0, 1e-7, 0.3, 1e-5), Indeterminate);
        assert_eq!(decide(5e-5, 1e-7, 1e-7, 1e-5), Indeterminate);
    }

    #[test]
    fn report_csv_has_header_and_rows() {
        let r = verdict(&circle_curve(2).unwrap(), Tolerances::default()).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("s,tension,bitension_direct,bitension_frenet\n"));
        assert_eq!(text.lines().count(), r.per_sample.len() + 1);
    }
}
