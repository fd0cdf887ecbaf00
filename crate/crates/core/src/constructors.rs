//! Explicit biharmonic curves in `S^{2n+1}`, admissible frames, Frenet ODE
//! integration in any model, random Legendre curves and flow cylinders.

use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Matrix2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bitension::{self, BiharmonicVerdict};
use crate::classify::order4_profile;
use crate::curves::{self, ParamCurve, PositionFn};
use crate::diff::{self, Sampled, DEFAULT_SPACING};
use crate::error::{Error, Result};
use crate::models::{complex_structure, SpaceFormModel};

/// Parameter length of catalog curves without a natural period.
pub const DEFAULT_CURVE_LENGTH: f64 = 10.0;
/// Step of the Frenet ODE integrator.
pub const ODE_STEP: f64 = 1e-3;
/// Storage spacing of random Legendre curves. Their curvatures vary, so the
/// nested stencils need a finer grid than the constant-curvature catalog.
pub const RANDOM_CURVE_SPACING: f64 = 0.01;
pub const CYLINDER_T_SAMPLES: usize = 64;
pub const CYLINDER_S_SAMPLES: usize = 256;
/// Accepted deviation of the cylinder metric from `dt² + ds²`.
pub const CYLINDER_METRIC_TOL: f64 = 1e-6;
/// Accepted mismatch between `‖τ(F)‖` and the base curvature.
pub const CYLINDER_TENSION_TOL: f64 = 5e-3;

fn axis(dim: usize, i: usize) -> DVector<f64> {
    let mut v = DVector::zeros(dim);
    v[i] = 1.0;
    v
}

/// Orthonormal vectors `e₁..e₄` of `ℝ^{2n+2}` with prescribed `⟨e_i, 𝕀e_j⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleFrame {
    pub vectors: Vec<DVector<f64>>,
    /// `gram_i[(i, j)] = ⟨e_i, 𝕀e_j⟩`.
    pub gram_i: DMatrix<f64>,
    pub a: f64,
    pub b: f64,
}

impl AdmissibleFrame {
    fn new(vectors: Vec<DVector<f64>>, a: f64, b: f64) -> Self {
        let k = vectors.len();
        let gram_i = DMatrix::from_fn(k, k, |i, j| vectors[i].dot(&complex_structure(&vectors[j])));
        Self { vectors, gram_i, a, b }
    }

    /// Largest of the four cross terms `⟨e_{1,2}, 𝕀e_{3,4}⟩`.
    pub fn cross_residual(&self) -> f64 {
        [(0, 2), (0, 3), (1, 2), (1, 3)]
            .iter()
            .map(|&(i, j)| self.gram_i[(i, j)].abs())
            .fold(0.0, f64::max)
    }

    /// `|A⟨e₁,𝕀e₂⟩ + B⟨e₃,𝕀e₄⟩|`.
    pub fn weighted_residual(&self) -> f64 {
        (self.a * self.gram_i[(0, 1)] + self.b * self.gram_i[(2, 3)]).abs()
    }

    /// `max |⟨e_i, e_j⟩ - δ_ij|`.
    pub fn orthonormality_residual(&self) -> f64 {
        let k = self.vectors.len();
        let mut m: f64 = 0.0;
        for i in 0..k {
            for j in 0..k {
                let d = if i == j { 1.0 } else { 0.0 };
                m = m.max((self.vectors[i].dot(&self.vectors[j]) - d).abs());
            }
        }
        m
    }
}

/// Frame satisfying the explicit-helix constraints
/// `⟨e_{1,2}, 𝕀e_{3,4}⟩ = 0` and `A⟨e₁,𝕀e₂⟩ + B⟨e₃,𝕀e₄⟩ = 0`.
///
/// With complex axes `u_k` (`𝕀u_k` the next real axis): for `n ≥ 3`,
/// `⟨e₁,𝕀e₂⟩ = -B/√(A²+B²)` and `⟨e₃,𝕀e₄⟩ = A/√(A²+B²)` inside the complex
/// planes `span(u₁,u₂)`, `span(u₃,u₄)`. For `n = 2` only three complex axes
/// exist, so the pair with the larger weight becomes a complex line
/// (`⟨·,𝕀·⟩ = ±1`) and the other pair takes the ratio.
pub fn canonical_admissible_frame(n: usize, a: f64, b: f64) -> Result<AdmissibleFrame> {
    if n < 2 {
        return Err(Error::Dimension(format!("admissible frame needs n >= 2, got {n}")));
    }
    if !(a >= 0.0 && b >= 0.0 && a + b > 0.0) {
        return Err(Error::Parameter(format!("need A, B >= 0 not both zero (A={a}, B={b})")));
    }
    let dim = 2 * n + 2;
    let u = |k: usize| axis(dim, 2 * k);
    let iu = |k: usize| axis(dim, 2 * k + 1);
    // a unit vector v in span_C(u_k, u_l) with ⟨u_k, 𝕀v⟩ = -x
    let tilted = |k: usize, l: usize, x: f64| u(l) * (1.0 - x * x).max(0.0).sqrt() + iu(k) * x;
    let vectors = if n >= 3 {
        let norm = (a * a + b * b).sqrt();
        let (lambda, mu) = (b / norm, a / norm);
        vec![u(0), tilted(0, 1, lambda), u(2), tilted(2, 3, -mu)]
    } else if b <= a {
        // ⟨e₃,𝕀e₄⟩ = 1, ⟨e₁,𝕀e₂⟩ = -B/A
        vec![u(0), tilted(0, 1, b / a), u(2), -iu(2)]
    } else {
        // ⟨e₁,𝕀e₂⟩ = 1, ⟨e₃,𝕀e₄⟩ = -A/B
        vec![u(0), -iu(0), u(1), tilted(1, 2, a / b)]
    };
    Ok(AdmissibleFrame::new(vectors, a, b))
}

fn sphere_curve(n: usize, pos: PositionFn, length: f64) -> Result<ParamCurve> {
    let m = SpaceFormModel::unit_sphere(n)?;
    ParamCurve::with_spacing(m, pos, (0.0, length), DEFAULT_SPACING)
}

/// `(1/√2)(cos(√2 s) e₁ + sin(√2 s) e₂ + e₃)` with a totally real frame,
/// over two periods.
pub fn circle_curve(n: usize) -> Result<ParamCurve> {
    circle_curve_with_length(n, 2.0 * PI * SQRT_2)
}

pub fn circle_curve_with_length(n: usize, length: f64) -> Result<ParamCurve> {
    if n < 2 {
        return Err(Error::Dimension(format!("circle family needs n >= 2, got {n}")));
    }
    let dim = 2 * n + 2;
    let (e1, e2, e3) = (axis(dim, 0), axis(dim, 2), axis(dim, 4));
    let pos: PositionFn = Arc::new(move |s: f64| {
        (&e1 * (SQRT_2 * s).cos() + &e2 * (SQRT_2 * s).sin() + &e3) / SQRT_2
    });
    sphere_curve(n, pos, length)
}

/// `(1/√2)(cos(As)e₁ + sin(As)e₂ + cos(Bs)e₃ + sin(Bs)e₄)`,
/// `A = √(1+κ₁)`, `B = √(1-κ₁)`.
pub fn helix_curve(n: usize, kappa1: f64) -> Result<ParamCurve> {
    helix_curve_with_length(n, kappa1, DEFAULT_CURVE_LENGTH)
}

pub fn helix_curve_with_length(n: usize, kappa1: f64, length: f64) -> Result<ParamCurve> {
    if !(kappa1 > 0.0 && kappa1 < 1.0) {
        return Err(Error::Parameter(format!("helix family needs kappa1 in (0,1), got {kappa1}")));
    }
    let (a, b) = ((1.0 + kappa1).sqrt(), (1.0 - kappa1).sqrt());
    let f = canonical_admissible_frame(n, a, b)?;
    let [e1, e2, e3, e4]: [DVector<f64>; 4] = f.vectors.try_into().expect("four vectors");
    let pos: PositionFn = Arc::new(move |s: f64| {
        (&e1 * (a * s).cos() + &e2 * (a * s).sin() + &e3 * (b * s).cos() + &e4 * (b * s).sin()) / SQRT_2
    });
    sphere_curve(n, pos, length)
}

/// Legendre circle of curvature `κ` in a totally real 3-plane of `S^{2n+1}`.
pub fn small_circle_curve(n: usize, kappa: f64) -> Result<ParamCurve> {
    if n < 2 {
        return Err(Error::Dimension(format!("small circle needs n >= 2, got {n}")));
    }
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::Parameter(format!("kappa must be positive, got {kappa}")));
    }
    let dim = 2 * n + 2;
    let r = 1.0 / (1.0 + kappa * kappa).sqrt();
    let h = (1.0 - r * r).sqrt();
    let (e1, e2, e3) = (axis(dim, 0), axis(dim, 2), axis(dim, 4));
    let pos: PositionFn =
        Arc::new(move |s: f64| &e1 * (r * (s / r).cos()) + &e2 * (r * (s / r).sin()) + &e3 * h);
    sphere_curve(n, pos, (2.0 * PI * r).max(DEFAULT_CURVE_LENGTH))
}

/// Legendre great circle `cos s e₁ + sin s e₂` with `⟨e₁,𝕀e₂⟩ = 0`.
pub fn legendre_geodesic(n: usize) -> Result<ParamCurve> {
    let dim = 2 * n + 2;
    let (e1, e2) = (axis(dim, 0), axis(dim, 2));
    let pos: PositionFn = Arc::new(move |s: f64| &e1 * s.cos() + &e2 * s.sin());
    sphere_curve(n, pos, 2.0 * PI)
}

/// Integral curve of `ξ` through the model's base point.
pub fn xi_orbit(m: &SpaceFormModel, length: f64) -> Result<ParamCurve> {
    let p = base_point(m);
    let mm = *m;
    let scale = 1.0 / m.norm_at(&p, &m.xi_at(&p));
    let pos: PositionFn = Arc::new(move |s: f64| mm.flow_at(&p, s * scale));
    ParamCurve::with_spacing(*m, pos, (0.0, length), DEFAULT_SPACING)
}

/// Point at which catalog frames are synthesised.
pub fn base_point(m: &SpaceFormModel) -> DVector<f64> {
    let d = m.ambient_dim();
    if m.is_sphere() {
        axis(d, 0)
    } else {
        DVector::zeros(d)
    }
}

/// A point with an orthonormal frame `E₁..E_r` in the model metric.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialFrame {
    pub point: DVector<f64>,
    pub vectors: Vec<DVector<f64>>,
}

impl InitialFrame {
    pub fn orthonormality_residual(&self, m: &SpaceFormModel) -> f64 {
        let mut r: f64 = 0.0;
        for (i, a) in self.vectors.iter().enumerate() {
            for (j, b) in self.vectors.iter().enumerate() {
                let d = if i == j { 1.0 } else { 0.0 };
                r = r.max((m.g_at(&self.point, a, b) - d).abs());
            }
        }
        r
    }
}

/// Unit contact vector at `p` orthogonal to the orthonormal set `against`
/// (which should contain `ξ` or be contact).
fn contact_unit_orthogonal(m: &SpaceFormModel, p: &DVector<f64>, against: &[DVector<f64>]) -> Result<DVector<f64>> {
    let xi = m.xi_at(p);
    let xi_unit = &xi / m.norm_at(p, &xi);
    for k in 0..m.ambient_dim() {
        let mut w = m.project_tangent(p, &axis(m.ambient_dim(), k));
        for _ in 0..2 {
            w -= &xi_unit * m.g_at(p, &w, &xi_unit);
            for e in against {
                w -= e * m.g_at(p, &w, e);
            }
        }
        let nrm = m.norm_at(p, &w);
        if nrm > 0.1 {
            return Ok(w / nrm);
        }
    }
    Err(Error::Dimension(format!(
        "no contact direction orthogonal to {} vectors in {}",
        against.len(),
        m.name()
    )))
}

/// Requested structure of an initial Frenet frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FrameRequest {
    /// `[T, Y]` with `Y ⟂ T, φT, ξ`.
    CaseTwoCircle,
    /// `[T, Y, Z]` with `Y, φY, Z, φZ ⟂ T, φT, ξ` (needs `n ≥ 3`).
    CaseTwoHelix,
    /// `[T, σφT, σξ]`.
    CaseThree { sigma: i8 },
    /// `φT = cos α₀ E₂ + sin α₀ E₄`, `η(E₃) = cos α₀/κ₂`, and `τ₂₃` as given.
    Order4 { kappa2: f64, alpha0: f64, tau23: f64 },
}

/// Builds an initial frame at the model's base point.
pub fn synthesize_frame(m: &SpaceFormModel, request: FrameRequest) -> Result<InitialFrame> {
    let p = base_point(m);
    let t = contact_unit_orthogonal(m, &p, &[])?;
    let phit = m.phi_at(&p, &t);
    let vectors = match request {
        FrameRequest::CaseTwoCircle => {
            let y = contact_unit_orthogonal(m, &p, &[t.clone(), phit])?;
            vec![t, y]
        }
        FrameRequest::CaseTwoHelix => {
            let y = contact_unit_orthogonal(m, &p, &[t.clone(), phit.clone()])?;
            let phiy = m.phi_at(&p, &y);
            let z = contact_unit_orthogonal(m, &p, &[t.clone(), phit, y.clone(), phiy])
                .map_err(|_| Error::Dimension("Case II helix needs n >= 3".into()))?;
            vec![t, y, z]
        }
        FrameRequest::CaseThree { sigma } => {
            let s = if sigma < 0 { -1.0 } else { 1.0 };
            let xi = m.xi_at(&p);
            let xi = &xi / m.norm_at(&p, &xi);
            vec![t, phit * s, xi * s]
        }
        FrameRequest::Order4 { kappa2, alpha0, tau23 } => {
            let y = contact_unit_orthogonal(m, &p, &[t.clone(), phit.clone()])?;
            let phiy = m.phi_at(&p, &y);
            let (ca, sa) = (alpha0.cos(), alpha0.sin());
            let e2 = &phit * ca + &y * sa;
            let e4 = &phit * sa - &y * ca;
            let eta3 = ca / kappa2;
            if eta3.abs() > 1.0 {
                return Err(Error::FrameSynthesis(format!("|eta(E3)| = {} > 1", eta3.abs())));
            }
            let xi = m.xi_at(&p);
            let xi = &xi / m.norm_at(&p, &xi);
            let candidates: Vec<DVector<f64>> = [1.0, -1.0]
                .iter()
                .map(|eps| &xi * eta3 + &phiy * (eps * (1.0 - eta3 * eta3).sqrt()))
                .collect();
            let best = candidates
                .into_iter()
                .map(|e3| {
                    let t23 = m.g_at(&p, &e2, &m.phi_at(&p, &e3));
                    ((t23 - tau23).abs(), e3)
                })
                .min_by(|a, b| a.0.total_cmp(&b.0))
                .expect("two candidates");
            if best.0 > 1e-8 {
                return Err(Error::FrameSynthesis(format!(
                    "no E3 reaches tau23 = {tau23} (closest off by {:e})",
                    best.0
                )));
            }
            vec![t, e2, best.1, e4]
        }
    };
    Ok(InitialFrame { point: p, vectors })
}

type State = Vec<DVector<f64>>;

fn axpy(state: &State, k: &State, h: f64) -> State {
    state.iter().zip(k.iter()).map(|(s, d)| s + d * h).collect()
}

fn rk4_step(state: &State, s: f64, h: f64, rhs: &dyn Fn(f64, &State) -> State) -> State {
    let k1 = rhs(s, state);
    let k2 = rhs(s + 0.5 * h, &axpy(state, &k1, 0.5 * h));
    let k3 = rhs(s + 0.5 * h, &axpy(state, &k2, 0.5 * h));
    let k4 = rhs(s + h, &axpy(state, &k3, h));
    state
        .iter()
        .enumerate()
        .map(|(i, x)| x + (&k1[i] + &k2[i] * 2.0 + &k3[i] * 2.0 + &k4[i]) * (h / 6.0))
        .collect()
}

/// Integrates `p' = E₁`, `∇_T E_i = -κ_{i-1}E_{i-1} + κ_i E_{i+1}` with constant
/// curvatures by classical RK4 (step [`ODE_STEP`]), retracting the point and
/// re-orthonormalising the frame after every step. Samples are stored every
/// [`DEFAULT_SPACING`].
pub fn integrate_frenet_ode(
    m: &SpaceFormModel,
    frame: &InitialFrame,
    kappas: &[f64],
    length: f64,
) -> Result<ParamCurve> {
    let r = frame.vectors.len();
    if r != kappas.len() + 1 {
        return Err(Error::InvalidArgument(format!(
            "{r} frame vectors need {} curvatures, got {}",
            r - 1,
            kappas.len()
        )));
    }
    if kappas.iter().any(|k| !(*k > 0.0)) {
        return Err(Error::Parameter("curvatures must be positive".into()));
    }
    let ortho = frame.orthonormality_residual(m);
    if ortho > 1e-8 {
        return Err(Error::FrameSynthesis(format!("initial frame not orthonormal ({ortho:e})")));
    }
    let eta = m.eta_at(&frame.point, &frame.vectors[0]).abs();
    if eta > 1e-10 {
        return Err(Error::FrameSynthesis(format!("eta(E1) = {eta:e}: not a Legendre direction")));
    }
    let kappas = kappas.to_vec();
    let mm = *m;
    let rhs = move |_s: f64, st: &State| -> State {
        let p = &st[0];
        let t = &st[1];
        let mut out = Vec::with_capacity(st.len());
        out.push(t.clone());
        for i in 0..r {
            let mut d = -mm.connection_term(p, t, &st[i + 1]);
            if i > 0 {
                d -= &st[i] * kappas[i - 1];
            }
            if i + 1 < r {
                d += &st[i + 2] * kappas[i];
            }
            out.push(d);
        }
        out
    };
    let mut state: State = std::iter::once(frame.point.clone())
        .chain(frame.vectors.iter().cloned())
        .collect();
    integrate_sampled(m, &mut state, length, DEFAULT_SPACING, &rhs, |m, st| {
        st[0] = m.retract(&st[0]);
        let frame = m.orthonormalize(&st[0], &st[1..])?;
        st[1..].clone_from_slice(&frame);
        Ok(())
    })
}

fn integrate_sampled(
    m: &SpaceFormModel,
    state: &mut State,
    length: f64,
    h: f64,
    rhs: &dyn Fn(f64, &State) -> State,
    fix: impl Fn(&SpaceFormModel, &mut State) -> Result<()>,
) -> Result<ParamCurve> {
    if !(length > 0.0) {
        return Err(Error::InvalidArgument("length must be positive".into()));
    }
    let per = (h / ODE_STEP).round() as usize;
    let step = h / per as f64;
    let samples = (length / h).round() as usize + 1;
    let mut points = Vec::with_capacity(samples);
    points.push(state[0].clone());
    let mut s = 0.0;
    for _ in 1..samples {
        for _ in 0..per {
            *state = rk4_step(state, s, step, rhs);
            fix(m, state)?;
            s += step;
        }
        points.push(state[0].clone());
    }
    ParamCurve::from_samples(*m, 0.0, h, points)
}

/// Model of constant φ-sectional curvature `c` with the given `n`.
fn model_for(c: f64, n: usize) -> Result<SpaceFormModel> {
    SpaceFormModel::for_c(c, n)
}

/// Circle with `κ₁² = (c+3)/4` and `E₂ ⟂ φT`.
pub fn case2_circle_curve(c: f64, n: usize, length: f64) -> Result<ParamCurve> {
    if !(c > -3.0) {
        return Err(Error::Parameter(format!("Case II circle needs c > -3, got {c}")));
    }
    let m = model_for(c, n)?;
    let frame = synthesize_frame(&m, FrameRequest::CaseTwoCircle)?;
    integrate_frenet_ode(&m, &frame, &[((c + 3.0) / 4.0).sqrt()], length)
}

/// Helix with `κ₁² + κ₂² = (c+3)/4` and `E₂, E₃ ⟂ φT` (needs `n ≥ 3`).
pub fn case2_helix_curve(c: f64, n: usize, kappa1: f64, length: f64) -> Result<ParamCurve> {
    let k2sq = (c + 3.0) / 4.0 - kappa1 * kappa1;
    if !(kappa1 > 0.0 && k2sq > 0.0) {
        return Err(Error::Parameter(format!(
            "Case II helix needs 0 < kappa1^2 < (c+3)/4 (kappa1 = {kappa1}, c = {c})"
        )));
    }
    let m = model_for(c, n)?;
    let frame = synthesize_frame(&m, FrameRequest::CaseTwoHelix)?;
    integrate_frenet_ode(&m, &frame, &[kappa1, k2sq.sqrt()], length)
}

/// Helix with Frenet frame `{T, σφT, σξ}` and `κ₂ = 1`.
pub fn case3_curve(c: f64, n: usize, kappa1: f64, sigma: i8, length: f64) -> Result<ParamCurve> {
    let m = model_for(c, n)?;
    let frame = synthesize_frame(&m, FrameRequest::CaseThree { sigma })?;
    integrate_frenet_ode(&m, &frame, &[kappa1, 1.0], length)
}

/// Osculating-order-4 curve from [`order4_profile`] on the given sign branch.
pub fn order4_curve(c: f64, n: usize, sign: i8, length: f64) -> Result<ParamCurve> {
    let profile = order4_profile(c);
    let (Some(kappa), Some(branch)) = (profile.kappa, profile.branch(sign)) else {
        return Err(Error::Parameter(
            profile.reason.unwrap_or_else(|| "no such branch".into()),
        ));
    };
    let m = model_for(c, n)?;
    let frame = synthesize_frame(
        &m,
        FrameRequest::Order4 {
            kappa2: kappa[1],
            alpha0: branch.alpha0,
            tau23: branch.tau(2, 3),
        },
    )?;
    integrate_frenet_ode(&m, &frame, &kappa, length)
}

/// Parameters of a random Legendre curve `∇_T T = α(s)φT + β(s)N`,
/// `∇_T N = -β(s)T + μ(s)φN`. Each profile is `c₀ + c₁ sin(c₂ s + c₃)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomLegendreParams {
    pub alpha: [f64; 4],
    pub beta: [f64; 4],
    pub mu: [f64; 4],
}

impl RandomLegendreParams {
    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut profile = |c0: (f64, f64), c1: f64| {
            [
                rng.random_range(c0.0..c0.1),
                rng.random_range(0.0..c1),
                rng.random_range(0.2..1.5),
                rng.random_range(0.0..PI),
            ]
        };
        Self {
            alpha: profile((-1.0, 1.0), 0.5),
            beta: profile((0.6, 1.2), 0.3),
            mu: profile((-1.0, 1.0), 0.5),
        }
    }

    fn eval(c: &[f64; 4], s: f64) -> f64 {
        c[0] + c[1] * (c[2] * s + c[3]).sin()
    }
}

/// Random Legendre curve through a random point of `m`.
///
/// The state carries a unit field `N ⟂ T, φT, ξ` with
/// `∇_T T = αφT + βN` and `∇_T N = -βT + μφN`; both equations preserve
/// `η(T) = 0`, `‖T‖ = 1` and the orthogonality of `N`.
pub fn random_legendre_curve(m: &SpaceFormModel, seed: u64, length: f64) -> Result<(ParamCurve, RandomLegendreParams)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = RandomLegendreParams::sample(&mut rng);
    let p = if m.is_sphere() {
        m.random_point(&mut rng)
    } else {
        m.random_point(&mut rng) * 0.5
    };
    let t = m.random_contact_unit(&mut rng, &p);
    let phit = m.phi_at(&p, &t);
    let seed_n = m.random_contact_unit(&mut rng, &p);
    let n = m.orthonormalize(&p, &[t.clone(), phit, seed_n])?.pop().expect("three vectors");
    let mm = *m;
    let rhs = move |s: f64, st: &State| -> State {
        let (p, t, n) = (&st[0], &st[1], &st[2]);
        let a = RandomLegendreParams::eval(&params.alpha, s);
        let b = RandomLegendreParams::eval(&params.beta, s);
        let mu = RandomLegendreParams::eval(&params.mu, s);
        let dt = mm.phi_at(p, t) * a + n * b - mm.connection_term(p, t, t);
        let dn = mm.phi_at(p, n) * mu - t * b - mm.connection_term(p, t, n);
        vec![t.clone(), dt, dn]
    };
    let mut state = vec![p, t, n];
    let curve = integrate_sampled(m, &mut state, length, RANDOM_CURVE_SPACING, &rhs, |m, st| {
        st[0] = m.retract(&st[0]);
        let p = st[0].clone();
        let xi = m.xi_at(&p);
        let phit = m.phi_at(&p, &st[1]);
        let frame = m.orthonormalize(&p, &[xi, st[1].clone(), phit, st[2].clone()])?;
        st[1] = frame[1].clone();
        st[2] = frame[3].clone();
        Ok(())
    })?;
    Ok((curve, params))
}

/// Grid `F(t_j, s_k) = φ_{t_j}(γ(s_k))` of the flow cylinder over a curve.
#[derive(Debug, Clone)]
pub struct CylinderPatch {
    pub model: SpaceFormModel,
    /// The generating curve at its own sampling.
    pub curve: ParamCurve,
    /// The generating curve resampled onto the grid's `s` columns.
    pub base: ParamCurve,
    pub t_range: (f64, f64),
    pub t_values: Vec<f64>,
    pub s_values: Vec<f64>,
    /// `points[j][k] = F(t_j, s_k)`.
    pub points: Vec<Vec<DVector<f64>>>,
    pub base_legendre_residual: f64,
    pub warnings: Vec<String>,
}

/// Flow cylinder on the default 64×256 grid.
pub fn flow_cylinder(curve: &ParamCurve, t_range: (f64, f64)) -> Result<CylinderPatch> {
    flow_cylinder_grid(curve, t_range, CYLINDER_T_SAMPLES, CYLINDER_S_SAMPLES)
}

pub fn flow_cylinder_grid(curve: &ParamCurve, t_range: (f64, f64), nt: usize, ns: usize) -> Result<CylinderPatch> {
    if !(t_range.1 > t_range.0) || nt < 2 || ns < 2 {
        return Err(Error::InvalidArgument("empty cylinder grid".into()));
    }
    let m = *curve.model();
    let base = curve.with_sample_count(ns)?;
    let base_samples = base.samples();
    let ht = (t_range.1 - t_range.0) / (nt - 1) as f64;
    let t_values: Vec<f64> = (0..nt).map(|j| t_range.0 + j as f64 * ht).collect();
    let s_values: Vec<f64> = (0..ns).map(|k| base_samples.s(k)).collect();
    let points = t_values
        .iter()
        .map(|&t| base_samples.points.iter().map(|p| m.flow_at(p, t)).collect())
        .collect();
    let base_legendre_residual = curves::legendre_residual(&base)?;
    let mut warnings = Vec::new();
    if base_legendre_residual > 1e-6 {
        warnings.push(format!(
            "base curve is not Legendre (|eta(T)| up to {base_legendre_residual:e}); product metric not expected"
        ));
    }
    Ok(CylinderPatch {
        model: m,
        curve: curve.clone(),
        base,
        t_range,
        t_values,
        s_values,
        points,
        base_legendre_residual,
        warnings,
    })
}

/// Partial derivatives of a grid field along `t` (rows) or `s` (columns),
/// stored as `[j][k]` options (None where the stencil does not fit).
fn grid_partial(
    grid: &[Vec<Option<DVector<f64>>>],
    along_t: bool,
    h: f64,
    levels: usize,
) -> Result<Vec<Vec<Option<DVector<f64>>>>> {
    let (nt, ns) = (grid.len(), grid[0].len());
    let mut out = vec![vec![None; ns]; nt];
    let lines = if along_t { ns } else { nt };
    for l in 0..lines {
        let line: Vec<Option<DVector<f64>>> = if along_t {
            (0..nt).map(|j| grid[j][l].clone()).collect()
        } else {
            grid[l].clone()
        };
        let start = line.iter().position(|v| v.is_some()).unwrap_or(line.len());
        let end = line.iter().rposition(|v| v.is_some()).map_or(start, |e| e + 1);
        if end <= start {
            continue;
        }
        let field = Sampled::new(start, line[start..end].iter().map(|v| v.clone().unwrap()).collect());
        let d = diff::derivative(&field, h, levels)?;
        for i in d.range() {
            let v = Some(d.at(i).clone());
            if along_t {
                out[i][l] = v;
            } else {
                out[l][i] = v;
            }
        }
    }
    Ok(out)
}

/// Induced metric and tension of a cylinder patch.
#[derive(Debug, Clone)]
struct PatchGeometry {
    metric_residual: f64,
    xi_residual: f64,
    /// `(j, k, ‖τ(F)‖)` on the interior.
    tension: Vec<(usize, usize, f64)>,
}

impl CylinderPatch {
    fn ht(&self) -> f64 {
        self.t_values[1] - self.t_values[0]
    }

    fn hs(&self) -> f64 {
        self.s_values[1] - self.s_values[0]
    }

    fn geometry(&self) -> Result<PatchGeometry> {
        let m = self.model;
        let grid: Vec<Vec<Option<DVector<f64>>>> = self
            .points
            .iter()
            .map(|row| row.iter().cloned().map(Some).collect())
            .collect();
        let ft = grid_partial(&grid, true, self.ht(), 2)?;
        let fs = grid_partial(&grid, false, self.hs(), 2)?;
        let ftt = grid_partial(&ft, true, self.ht(), 1)?;
        let fss = grid_partial(&fs, false, self.hs(), 1)?;
        let fts = grid_partial(&fs, true, self.ht(), 1)?;
        let (nt, ns) = (self.t_values.len(), self.s_values.len());
        let mut metric_residual: f64 = 0.0;
        let mut xi_residual: f64 = 0.0;
        let mut tension = Vec::new();
        for j in 0..nt {
            for k in 0..ns {
                let p = &self.points[j][k];
                if let (Some(a), Some(b)) = (&ft[j][k], &fs[j][k]) {
                    let g = Matrix2::new(m.g_at(p, a, a), m.g_at(p, a, b), m.g_at(p, a, b), m.g_at(p, b, b));
                    metric_residual = metric_residual.max((g - Matrix2::identity()).abs().max());
                    xi_residual = xi_residual.max(m.norm_at(p, &(a - m.xi_at(p))));
                    if let (Some(att), Some(bss), Some(ats)) = (&ftt[j][k], &fss[j][k], &fts[j][k]) {
                        let ginv = g.try_inverse().ok_or_else(|| {
                            Error::DegenerateCurve("degenerate cylinder metric".into())
                        })?;
                        let cov_tt = att + m.connection_term(p, a, a);
                        let cov_ss = bss + m.connection_term(p, b, b);
                        let cov_ts = ats + m.connection_term(p, a, b);
                        let trace = cov_tt * ginv[(0, 0)] + cov_ss * ginv[(1, 1)] + cov_ts * (2.0 * ginv[(0, 1)]);
                        // normal part: remove the component in span(F_t, F_s)
                        let comps = [m.g_at(p, &trace, a), m.g_at(p, &trace, b)];
                        let c0 = ginv[(0, 0)] * comps[0] + ginv[(0, 1)] * comps[1];
                        let c1 = ginv[(1, 0)] * comps[0] + ginv[(1, 1)] * comps[1];
                        let normal = trace - a * c0 - b * c1;
                        tension.push((j, k, m.norm_at(p, &normal)));
                    }
                }
            }
        }
        if tension.is_empty() {
            return Err(Error::Stencil {
                needed: 2 * diff::half_width(2) + 2 * diff::half_width(1) + 1,
                available: nt.min(ns),
            });
        }
        Ok(PatchGeometry {
            metric_residual,
            xi_residual,
            tension,
        })
    }

    /// `max |g̃_ij - δ_ij|` over the grid.
    pub fn metric_residual(&self) -> Result<f64> {
        Ok(self.geometry()?.metric_residual)
    }

    /// `max ‖∂_t F - ξ(F)‖` over the grid.
    pub fn xi_column_residual(&self) -> Result<f64> {
        Ok(self.geometry()?.xi_residual)
    }
}

/// Result of the surface-tension check on a flow cylinder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CylinderReport {
    pub metric_residual: f64,
    pub xi_column_residual: f64,
    pub tension_max: f64,
    pub tension_min: f64,
    /// `max |‖τ(F)(t,s)‖ - κ₁(s)|`.
    pub tension_vs_kappa1: f64,
    pub base_kappa1_mean: f64,
    pub base_verdict: BiharmonicVerdict,
    /// Metric is the product metric and the tension reduces to the base curvature.
    pub consistent: bool,
    pub warnings: Vec<String>,
}

/// Discretised `τ(F) = trace ∇dF` compared with the base curvature `κ₁(s)`,
/// together with the base curve's own verdict.
pub fn cylinder_bitension_check(patch: &CylinderPatch) -> Result<CylinderReport> {
    let geo = patch.geometry()?;
    let base_tension = bitension::tension(&patch.base)?;
    let bs = patch.base.samples();
    let kappa = base_tension.map_indexed(|k, v| patch.model.norm_at(&bs.points[k], v));
    let mut vs: f64 = 0.0;
    let (mut tmax, mut tmin) = (0.0f64, f64::INFINITY);
    for &(_, k, tn) in &geo.tension {
        tmax = tmax.max(tn);
        tmin = tmin.min(tn);
        if let Some(kv) = kappa.get(k) {
            vs = vs.max((tn - kv).abs());
        }
    }
    let base_kappa1_mean = diff::mean_std(kappa.values.iter().copied()).0;
    let base = bitension::verdict(&patch.curve, crate::tolerances::Tolerances::default())?;
    let mut warnings = patch.warnings.clone();
    warnings.extend(base.warnings.iter().cloned());
    let consistent = geo.metric_residual < CYLINDER_METRIC_TOL && vs < CYLINDER_TENSION_TOL;
    Ok(CylinderReport {
        metric_residual: geo.metric_residual,
        xi_column_residual: geo.xi_residual,
        tension_max: tmax,
        tension_min: tmin,
        tension_vs_kappa1: vs,
        base_kappa1_mean,
        base_verdict: base.verdict,
        consistent,
        warnings,
    })
}
