//! Curves, arc-length reparametrisation, the numerical Frenet apparatus and
//! φ-torsions.

use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use nalgebra::DVector;

use crate::diff::{self, Sampled, DEFAULT_RICHARDSON_LEVELS};
use crate::error::{Error, Result};
use crate::models::SpaceFormModel;

/// Default osculating-order detection threshold.
pub const DEFAULT_TOL_ORDER: f64 = 1e-5;
/// Deepest Frenet vector computed numerically (`E_5`).
pub const MAX_COMPUTED_ORDER: usize = 5;
/// Accepted deviation of `‖γ'‖` from 1 for unit-speed input.
pub const UNIT_SPEED_TOL: f64 = 1e-6;
/// Fraction of the domain trimmed at each end before taking maxima.
pub const TRIM_FRACTION: f64 = 0.05;

pub type PositionFn = Arc<dyn Fn(f64) -> DVector<f64> + Send + Sync>;

/// A curve `s ↦ γ(s)` in a model, with a closed parameter interval and the
/// number of uniform samples used for analysis.
#[derive(Clone)]
pub struct ParamCurve {
    model: SpaceFormModel,
    position: PositionFn,
    domain: (f64, f64),
    sample_count: usize,
}

impl fmt::Debug for ParamCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParamCurve")
            .field("model", &self.model.name())
            .field("domain", &self.domain)
            .field("sample_count", &self.sample_count)
            .finish()
    }
}

impl ParamCurve {
    pub fn new(
        model: SpaceFormModel,
        position: PositionFn,
        domain: (f64, f64),
        sample_count: usize,
    ) -> Result<Self> {
        let (a, b) = domain;
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::InvalidArgument(format!("bad domain [{a}, {b}]")));
        }
        if sample_count < 2 {
            return Err(Error::InvalidArgument("need at least two samples".into()));
        }
        for k in 0..=8 {
            let s = a + (b - a) * k as f64 / 8.0;
            let p = position(s);
            if p.len() != model.ambient_dim() {
                return Err(Error::Dimension(format!(
                    "curve has {} coordinates, model expects {}",
                    p.len(),
                    model.ambient_dim()
                )));
            }
            if model.is_sphere() && (p.norm() - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidArgument(format!(
                    "curve leaves the sphere at s = {s}: |γ| = {}",
                    p.norm()
                )));
            }
        }
        Ok(Self {
            model,
            position,
            domain,
            sample_count,
        })
    }

    /// Curve sampled with (approximately) the given spacing.
    pub fn with_spacing(
        model: SpaceFormModel,
        position: PositionFn,
        domain: (f64, f64),
        h: f64,
    ) -> Result<Self> {
        let count = ((domain.1 - domain.0) / h).round() as usize + 1;
        Self::new(model, position, domain, count)
    }

    /// Curve through uniformly spaced samples. Positions between nodes come
    /// from local 6-point Lagrange interpolation followed by the model's
    /// retraction; nodes are reproduced exactly.
    pub fn from_samples(model: SpaceFormModel, s0: f64, h: f64, points: Vec<DVector<f64>>) -> Result<Self> {
        if points.len() < 6 {
            return Err(Error::Stencil {
                needed: 6,
                available: points.len(),
            });
        }
        let n = points.len();
        let pts = Arc::new(points);
        let pos: PositionFn = {
            let pts = Arc::clone(&pts);
            Arc::new(move |s: f64| {
                let x = (s - s0) / h;
                let nearest = x.round();
                if (x - nearest).abs() < 1e-9 && nearest >= 0.0 && (nearest as usize) < n {
                    return pts[nearest as usize].clone();
                }
                let base = (x.floor() as isize - 2).clamp(0, n as isize - 6) as usize;
                let mut acc = DVector::zeros(pts[0].len());
                for j in 0..6 {
                    let xj = (base + j) as f64;
                    let mut w = 1.0;
                    for m in 0..6 {
                        if m != j {
                            let xm = (base + m) as f64;
                            w *= (x - xm) / (xj - xm);
                        }
                    }
                    acc += &pts[base + j] * w;
                }
                model.retract(&acc)
            })
        };
        let end = s0 + h * (n - 1) as f64;
        Self::new(model, pos, (s0, end), n)
    }

    pub fn model(&self) -> &SpaceFormModel {
        &self.model
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    pub fn spacing(&self) -> f64 {
        (self.domain.1 - self.domain.0) / (self.sample_count - 1) as f64
    }

    pub fn position_fn(&self) -> &PositionFn {
        &self.position
    }

    pub fn at(&self, s: f64) -> DVector<f64> {
        (self.position)(s)
    }

    /// Same curve analysed with a different number of samples.
    pub fn with_sample_count(&self, sample_count: usize) -> Result<Self> {
        Self::new(self.model, Arc::clone(&self.position), self.domain, sample_count)
    }

    pub fn samples(&self) -> CurveSamples {
        let h = self.spacing();
        let points = (0..self.sample_count)
            .map(|k| self.at(self.domain.0 + k as f64 * h))
            .collect();
        CurveSamples {
            model: self.model,
            s0: self.domain.0,
            h,
            points,
        }
    }

    /// `‖γ'(s)‖` in the model metric from a Richardson difference of the
    /// position map.
    pub fn speed(&self, s: f64) -> f64 {
        let v = diff::derivative_vec_fn(|t| self.at(t), s, 1e-3, DEFAULT_RICHARDSON_LEVELS);
        self.model.norm_at(&self.at(s), &v)
    }
}

/// Uniform samples of a curve.
#[derive(Debug, Clone)]
pub struct CurveSamples {
    pub model: SpaceFormModel,
    pub s0: f64,
    pub h: f64,
    pub points: Vec<DVector<f64>>,
}

impl CurveSamples {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn s(&self, k: usize) -> f64 {
        self.s0 + k as f64 * self.h
    }

    pub fn as_field(&self) -> Sampled<DVector<f64>> {
        Sampled::new(0, self.points.clone())
    }

    /// `T = γ'` on the grid.
    pub fn velocity(&self) -> Result<Sampled<DVector<f64>>> {
        diff::derivative(&self.as_field(), self.h, DEFAULT_RICHARDSON_LEVELS)
    }

    /// Interior `90%` of the grid over which maxima are reported.
    pub fn interior(&self) -> Range<usize> {
        let last = (self.len() - 1) as f64;
        let lo = (TRIM_FRACTION * last).ceil() as usize;
        let hi = ((1.0 - TRIM_FRACTION) * last).floor() as usize + 1;
        lo..hi
    }

    /// `∇_T V` along the samples.
    pub fn covariant_derivative(
        &self,
        velocity: &Sampled<DVector<f64>>,
        field: &Sampled<DVector<f64>>,
    ) -> Result<Sampled<DVector<f64>>> {
        self.model
            .covariant_derivative(&self.points, velocity, field, self.h, DEFAULT_RICHARDSON_LEVELS)
    }
}

/// Fails with a stencil error unless `needed` is contained in `available`.
pub fn require_range(needed: &Range<usize>, available: &Range<usize>) -> Result<()> {
    if needed.start < available.start || needed.end > available.end {
        return Err(Error::Stencil {
            needed: needed.len(),
            available: available.end.saturating_sub(needed.start.max(available.start)),
        });
    }
    Ok(())
}

fn max_over(field: &Sampled<f64>, range: Range<usize>) -> f64 {
    range.map(|k| *field.at(k)).fold(0.0, f64::max)
}

fn min_over(field: &Sampled<f64>, range: Range<usize>) -> f64 {
    range.map(|k| *field.at(k)).fold(f64::INFINITY, f64::min)
}

/// Unit-speed reparametrisation of `curve`.
///
/// The arc-length function is tabulated with composite 5-point Gauss–Legendre
/// quadrature of the metric speed and inverted by Newton iteration. The new
/// domain starts where the old one did and has the curve's length.
pub fn reparametrize_arclength(curve: &ParamCurve) -> Result<ParamCurve> {
    const NODES: [f64; 5] = [
        -0.906_179_845_938_664,
        -0.538_469_310_105_683,
        0.0,
        0.538_469_310_105_683,
        0.906_179_845_938_664,
    ];
    const WEIGHTS: [f64; 5] = [
        0.236_926_885_056_189_1,
        0.478_628_670_499_366_5,
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
    ];
    let (a, b) = curve.domain();
    let intervals = 1024usize;
    let dt = (b - a) / intervals as f64;
    let c = curve.clone();
    let speed = move |t: f64| c.speed(t);
    let gl = |lo: f64, hi: f64, f: &dyn Fn(f64) -> f64| {
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        NODES
            .iter()
            .zip(WEIGHTS.iter())
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    };

    let mut table = Vec::with_capacity(intervals + 1);
    table.push(0.0);
    let mut min_speed = f64::INFINITY;
    for i in 0..intervals {
        let lo = a + i as f64 * dt;
        let hi = lo + dt;
        for x in NODES {
            min_speed = min_speed.min(speed(0.5 * (lo + hi) + 0.5 * dt * x));
        }
        let prev = *table.last().unwrap();
        table.push(prev + gl(lo, hi, &speed));
    }
    if !(min_speed > 1e-8) {
        return Err(Error::DegenerateCurve(format!(
            "velocity vanishes (min speed {min_speed:e})"
        )));
    }
    let length = table[intervals];
    let table = Arc::new(table);
    let source = Arc::clone(curve.position_fn());
    let speed = Arc::new(speed);

    let param_of = {
        let table = Arc::clone(&table);
        let speed = Arc::clone(&speed);
        move |s: f64| -> f64 {
            let target = (s - a).clamp(0.0, length);
            let i = match table.binary_search_by(|v| v.partial_cmp(&target).unwrap()) {
                Ok(i) => i.min(intervals - 1),
                Err(i) => i.saturating_sub(1).min(intervals - 1),
            };
            let t0 = a + i as f64 * dt;
            let mut t = t0 + dt * (target - table[i]) / (table[i + 1] - table[i]);
            for _ in 0..8 {
                let sigma = table[i] + gl(t0, t, speed.as_ref());
                let step = (sigma - target) / speed(t);
                t -= step;
                if step.abs() < 1e-15 {
                    break;
                }
            }
            t
        }
    };
    let position: PositionFn = Arc::new(move |s: f64| source(param_of(s)));
    ParamCurve::new(*curve.model(), position, (a, a + length), curve.sample_count())
}

/// φ-torsions `τ_ij = g(E_i, φE_j)` for `i < j ≤ r`.
#[derive(Debug, Clone)]
pub struct TorsionMatrix {
    order: usize,
    entries: Vec<((usize, usize), Sampled<f64>)>,
    interior: Range<usize>,
}

impl TorsionMatrix {
    pub fn order(&self) -> usize {
        self.order
    }

    /// Sampled `τ_ij` (1-based indices); `τ_ji = -τ_ij`.
    pub fn get(&self, i: usize, j: usize) -> Option<Sampled<f64>> {
        if i == j {
            return None;
        }
        let (lo, hi, sign) = if i < j { (i, j, 1.0) } else { (j, i, -1.0) };
        self.entries
            .iter()
            .find(|(ij, _)| *ij == (lo, hi))
            .map(|(_, s)| s.map(|v| sign * v))
    }

    /// Mean and standard deviation of `τ_ij` over the interior samples.
    pub fn stats(&self, i: usize, j: usize) -> Option<(f64, f64)> {
        let s = self.get(i, j)?;
        Some(diff::mean_std(self.interior.clone().map(|k| *s.at(k))))
    }

    pub fn mean(&self, i: usize, j: usize) -> Option<f64> {
        self.stats(i, j).map(|x| x.0)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.entries.iter().map(|(ij, _)| *ij)
    }
}

/// Numerical Frenet apparatus of a unit-speed curve.
#[derive(Debug, Clone)]
pub struct FrenetData {
    pub model: SpaceFormModel,
    pub s0: f64,
    pub h: f64,
    pub points: Vec<DVector<f64>>,
    /// Osculating order `r`.
    pub order: usize,
    /// `E_1 .. E_r`.
    pub frames: Vec<Sampled<DVector<f64>>>,
    /// `κ_1 .. κ_{r-1}`.
    pub curvatures: Vec<Sampled<f64>>,
    pub torsions: TorsionMatrix,
    /// `η(E_1) .. η(E_r)`.
    pub eta_components: Vec<Sampled<f64>>,
    /// Max over the interior of `‖∇_T E_i - (-κ_{i-1}E_{i-1} + κ_i E_{i+1})‖`.
    pub frenet_residual: f64,
    pub tol_order: f64,
    pub warnings: Vec<String>,
    pub interior: Range<usize>,
}

impl FrenetData {
    pub fn s(&self, k: usize) -> f64 {
        self.s0 + k as f64 * self.h
    }

    /// `κ_i` (1-based), or `None` past the osculating order.
    pub fn curvature(&self, i: usize) -> Option<&Sampled<f64>> {
        if i == 0 {
            return None;
        }
        self.curvatures.get(i - 1)
    }

    /// Mean and standard deviation of `κ_i` over the interior.
    pub fn curvature_stats(&self, i: usize) -> Option<(f64, f64)> {
        let k = self.curvature(i)?;
        Some(diff::mean_std(self.interior.clone().map(|j| *k.at(j))))
    }

    pub fn frame(&self, i: usize) -> Option<&Sampled<DVector<f64>>> {
        if i == 0 {
            return None;
        }
        self.frames.get(i - 1)
    }

    /// Constant angle `α₀` recovered from `τ₁₂ = -cos α₀`, `τ₁₄ = -sin α₀`,
    /// folded into `[0, 2π)`. Needs `r ≥ 4`.
    pub fn alpha0(&self) -> Option<f64> {
        let t12 = self.torsions.mean(1, 2)?;
        let t14 = self.torsions.mean(1, 4)?;
        Some((-t14).atan2(-t12).rem_euclid(std::f64::consts::TAU))
    }

    /// Max over the interior of `‖φT - (cos α E_2 + sin α E_4)‖` for the given angle.
    pub fn phi_t_decomposition_residual(&self, alpha: f64) -> Option<f64> {
        let e1 = self.frame(1)?;
        let e2 = self.frame(2)?;
        let e4 = self.frame(4)?;
        let m = self.model;
        Some(
            self.interior
                .clone()
                .map(|k| {
                    let p = &self.points[k];
                    let phit = m.phi_at(p, e1.at(k));
                    let w = phit - e2.at(k) * alpha.cos() - e4.at(k) * alpha.sin();
                    m.norm_at(p, &w)
                })
                .fold(0.0, f64::max),
        )
    }
}

/// Computes the Frenet apparatus by Gram–Schmidt of iterated covariant
/// derivatives. The order is the first `i` for which the orthogonal part of
/// `∇_T E_i` stays below `tol_order` on the interior.
pub fn frenet(curve: &ParamCurve, tol_order: f64) -> Result<FrenetData> {
    if !(tol_order > 0.0) {
        return Err(Error::InvalidArgument("tol_order must be positive".into()));
    }
    let samples = curve.samples();
    let m = samples.model;
    let interior = samples.interior();
    let t = samples.velocity()?;
    require_range(&interior, &t.range())?;

    let speed_err = t
        .range()
        .map(|k| (m.norm_at(&samples.points[k], t.at(k)) - 1.0).abs())
        .fold(0.0, f64::max);
    if speed_err > UNIT_SPEED_TOL {
        return Err(Error::Precondition(format!(
            "curve is not unit speed (max |‖γ'‖ - 1| = {speed_err:e})"
        )));
    }

    let cap = MAX_COMPUTED_ORDER.min(m.dim());
    let mut frames = vec![t];
    let mut curvatures: Vec<Sampled<f64>> = Vec::new();
    let mut warnings = Vec::new();
    let mut frenet_residual: f64 = 0.0;
    let order;

    loop {
        let i = frames.len();
        if i == cap {
            order = cap;
            break;
        }
        let d = samples.covariant_derivative(&frames[0], &frames[i - 1])?;
        let range = diff::common_range(frames.iter().map(|f| f.range()).chain([d.range()]));
        require_range(&interior, &range)?;

        let mut residuals = Vec::with_capacity(range.len());
        let mut kappa = Vec::with_capacity(range.len());
        let mut along = Vec::with_capacity(range.len());
        for k in range.clone() {
            let p = &samples.points[k];
            let dk = d.at(k);
            let mut res = dk.clone();
            let mut comps = Vec::with_capacity(i);
            for e in &frames {
                let c = m.g_at(p, dk, e.at(k));
                res -= e.at(k) * c;
                comps.push(c);
            }
            kappa.push(m.norm_at(p, &res));
            residuals.push(res);
            along.push(comps);
        }
        let kappa = Sampled::new(range.start, kappa);
        let kmax = max_over(&kappa, interior.clone());
        let kmin = min_over(&kappa, interior.clone());

        // Frenet residual of E_i: everything along E_1..E_i except -κ_{i-1} E_{i-1}.
        let prev_kappa = curvatures.last().cloned();
        for (idx, k) in range.clone().enumerate() {
            if !interior.contains(&k) {
                continue;
            }
            let comps = &along[idx];
            let mut r2 = 0.0;
            for (j, c) in comps.iter().enumerate() {
                let expected = if j + 2 == i {
                    -prev_kappa.as_ref().map(|pk| *pk.at(k)).unwrap_or(0.0)
                } else {
                    0.0
                };
                r2 += (c - expected).powi(2);
            }
            if kmax < tol_order {
                r2 += kappa.at(k).powi(2);
            }
            frenet_residual = frenet_residual.max(r2.sqrt());
        }

        if kmax < tol_order {
            if kmax > 0.1 * tol_order {
                warnings.push(format!(
                    "order ambiguity: max κ_{i} = {kmax:e} is within a decade below tol_order"
                ));
            }
            order = i;
            break;
        }
        if kmin < 10.0 * tol_order {
            warnings.push(format!(
                "order ambiguity: κ_{i} dips to {kmin:e} near tol_order"
            ));
        }
        let next = Sampled::new(
            range.start,
            residuals
                .into_iter()
                .zip(kappa.values.iter())
                .map(|(r, kv)| r / kv.max(f64::MIN_POSITIVE))
                .collect(),
        );
        curvatures.push(kappa);
        frames.push(next);
    }

    if frenet_residual > 10.0 * tol_order {
        warnings.push(format!(
            "Frenet equations hold only to {frenet_residual:e} (> 10·tol_order)"
        ));
    }

    let torsions = torsion_matrix(&m, &samples.points, &frames, interior.clone());
    let eta_components = frames
        .iter()
        .map(|e| e.map_indexed(|k, v| m.eta_at(&samples.points[k], v)))
        .collect();

    Ok(FrenetData {
        model: m,
        s0: samples.s0,
        h: samples.h,
        points: samples.points,
        order,
        frames,
        curvatures,
        torsions,
        eta_components,
        frenet_residual,
        tol_order,
        warnings,
        interior,
    })
}

fn torsion_matrix(
    m: &SpaceFormModel,
    points: &[DVector<f64>],
    frames: &[Sampled<DVector<f64>>],
    interior: Range<usize>,
) -> TorsionMatrix {
    let r = frames.len();
    let mut entries = Vec::new();
    for i in 1..=r {
        for j in i + 1..=r {
            let range = diff::common_range([frames[i - 1].range(), frames[j - 1].range()]);
            let vals = range
                .clone()
                .map(|k| {
                    let p = &points[k];
                    m.g_at(p, frames[i - 1].at(k), &m.phi_at(p, frames[j - 1].at(k)))
                })
                .collect();
            entries.push(((i, j), Sampled::new(range.start, vals)));
        }
    }
    TorsionMatrix {
        order: r,
        entries,
        interior,
    }
}

/// φ-torsion matrix of computed Frenet data.
pub fn phi_torsions(fd: &FrenetData) -> TorsionMatrix {
    fd.torsions.clone()
}

/// `max |η(T)|` over the samples where `T` is defined.
pub fn legendre_residual(curve: &ParamCurve) -> Result<f64> {
    let samples = curve.samples();
    let t = samples.velocity()?;
    let m = samples.model;
    Ok(t.range()
        .map(|k| m.eta_at(&samples.points[k], t.at(k)).abs())
        .fold(0.0, f64::max))
}
