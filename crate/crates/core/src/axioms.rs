//! Randomised structure-axiom suite for a [`SpaceFormModel`].

use std::time::Instant;

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::diff;
use crate::models::{ModelDescriptor, SpaceFormModel};
use crate::oracle;

/// Pointwise algebraic identities.
pub const ALGEBRAIC_TOL: f64 = 1e-8;
/// Identities checked through finite-difference stencils.
pub const STENCIL_TOL: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub name: String,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub model: ModelDescriptor,
    pub seed: u64,
    pub samples: usize,
    pub checks: Vec<AxiomCheck>,
    pub passed: bool,
    #[serde(skip)]
    pub elapsed_secs: f64,
}

impl AxiomReport {
    pub fn check(&self, name: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Acc {
    name: &'static str,
    tol: f64,
    max: f64,
    count: usize,
}

impl Acc {
    fn new(name: &'static str, tol: f64) -> Self {
        Self { name, tol, max: 0.0, count: 0 }
    }

    fn push(&mut self, r: f64) {
        self.count += 1;
        // NaN must fail the check
        if !(r <= self.max) {
            self.max = if r.is_nan() { f64::INFINITY } else { r };
        }
    }

    fn finish(self) -> AxiomCheck {
        AxiomCheck {
            name: self.name.into(),
            samples: self.count,
            max_residual: self.max,
            tolerance: self.tol,
            passed: self.max < self.tol,
        }
    }
}

/// Exterior derivative `dη(X,Y) = ½(X η(Y) - Y η(X))` for constant ambient
/// fields, by central differences of the natural extension of η.
fn d_eta_fd(m: &SpaceFormModel, p: &DVector<f64>, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    let h = 1e-3;
    let xy = diff::derivative_fn(|t| m.eta_at(&(p + x * t), y), 0.0, h, 1);
    let yx = diff::derivative_fn(|t| m.eta_at(&(p + y * t), x), 0.0, h, 1);
    0.5 * (xy - yx)
}

/// Differential of the ξ-flow applied to `v`.
fn flow_push(m: &SpaceFormModel, p: &DVector<f64>, v: &DVector<f64>, t: f64) -> DVector<f64> {
    diff::derivative_vec_fn(|e| m.flow_at(&(p + v * e), t), 0.0, 1e-3, 1)
}

/// Runs the structure-axiom suite on `samples` random (point, vector) draws.
///
/// The expensive chart-based cross-validations (brute-force curvature and
/// Christoffels) run on the first `min(samples, 5)` points.
pub fn validate_model(m: &SpaceFormModel, samples: usize, seed: u64) -> AxiomReport {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut phi_sq = Acc::new("phi_squared", ALGEBRAIC_TOL);
    let mut eta_xi = Acc::new("eta_xi", ALGEBRAIC_TOL);
    let mut eta_g = Acc::new("eta_equals_g_xi", ALGEBRAIC_TOL);
    let mut compat = Acc::new("phi_metric_compatibility", ALGEBRAIC_TOL);
    let mut deta = Acc::new("d_eta_equals_g_phi", STENCIL_TOL);
    let mut nabla_xi = Acc::new("nabla_xi_equals_minus_phi", STENCIL_TOL);
    let mut metric_compat = Acc::new("connection_metric_compatibility", STENCIL_TOL);
    let mut r_antisym = Acc::new("curvature_antisymmetry_xy", 1e-10);
    let mut r_skew = Acc::new("curvature_antisymmetry_zw", 1e-10);
    let mut bianchi = Acc::new("curvature_first_bianchi", 1e-10);
    let mut flow_g = Acc::new("flow_preserves_g", ALGEBRAIC_TOL);
    let mut flow_eta = Acc::new("flow_preserves_eta", ALGEBRAIC_TOL);
    let mut flow_phi = Acc::new("flow_preserves_phi", ALGEBRAIC_TOL);
    let mut r_cross = Acc::new("curvature_vs_bruteforce", STENCIL_TOL);
    let mut conn_cross = Acc::new("connection_vs_koszul", STENCIL_TOL);
    let mut phi_sect = Acc::new("phi_sectional_equals_c", STENCIL_TOL);
    let mut xi_sect = Acc::new("xi_sectional_equals_one", STENCIL_TOL);

    let expensive = samples.min(5);
    for k in 0..samples {
        let p = m.random_point(&mut rng);
        let x = m.random_tangent(&mut rng, &p);
        let y = m.random_tangent(&mut rng, &p);
        let z = m.random_tangent(&mut rng, &p);
        let w = m.random_tangent(&mut rng, &p);
        let xi = m.xi_at(&p);
        let g = |u: &DVector<f64>, v: &DVector<f64>| m.g_at(&p, u, v);
        let scale = 1.0 + g(&x, &x) + g(&y, &y);

        let ppx = m.phi_at(&p, &m.phi_at(&p, &x));
        phi_sq.push((ppx + &x - &xi * m.eta_at(&p, &x)).norm() / scale);
        eta_xi.push((m.eta_at(&p, &xi) - 1.0).abs());
        eta_g.push((m.eta_at(&p, &x) - g(&x, &xi)).abs() / scale);
        let lhs = g(&m.phi_at(&p, &x), &m.phi_at(&p, &y));
        compat.push((lhs - g(&x, &y) + m.eta_at(&p, &x) * m.eta_at(&p, &y)).abs() / scale);
        deta.push((d_eta_fd(m, &p, &x, &y) - g(&x, &m.phi_at(&p, &y))).abs() / scale);

        // ∇_X ξ along the retraction curve s ↦ p + sX.
        let curve = |s: f64| m.retract(&(&p + &x * s));
        let dxi = diff::derivative_vec_fn(|s| m.xi_at(&curve(s)), 0.0, 1e-3, 2);
        let vel = diff::derivative_vec_fn(curve, 0.0, 1e-3, 2);
        let cov = dxi + m.connection_term(&p, &vel, &xi);
        nabla_xi.push((cov + m.phi_at(&p, &x)).norm() / scale);

        // d/ds g(A,B) = g(∇A,B) + g(A,∇B) along s ↦ p + sX + s²Y.
        let gamma = |s: f64| m.retract(&(&p + &x * s + &y * (s * s)));
        let field_a = |s: f64| m.project_tangent(&gamma(s), &(&z + &w * s));
        let field_b = |s: f64| m.project_tangent(&gamma(s), &(&w - &z * (0.5 * s)));
        let vel = diff::derivative_vec_fn(gamma, 0.0, 1e-3, 2);
        let (a0, b0) = (field_a(0.0), field_b(0.0));
        let cov_a = diff::derivative_vec_fn(field_a, 0.0, 1e-3, 2) + m.connection_term(&p, &vel, &a0);
        let cov_b = diff::derivative_vec_fn(field_b, 0.0, 1e-3, 2) + m.connection_term(&p, &vel, &b0);
        let dg = diff::derivative_fn(
            |s| m.g_at(&gamma(s), &field_a(s), &field_b(s)),
            0.0,
            1e-3,
            2,
        );
        metric_compat.push((dg - g(&cov_a, &b0) - g(&a0, &cov_b)).abs() / (1.0 + g(&z, &z) + g(&w, &w)));

        let rxy = m.curvature_at(&p, &x, &y, &z);
        let ryx = m.curvature_at(&p, &y, &x, &z);
        let rscale = scale * (1.0 + g(&z, &z)) * (1.0 + m.c().abs());
        r_antisym.push((&rxy + ryx).norm() / rscale);
        let zw = g(&rxy, &w) + g(&m.curvature_at(&p, &x, &y, &w), &z);
        r_skew.push(zw.abs() / (rscale * (1.0 + g(&w, &w))));
        let cyc = &rxy + m.curvature_at(&p, &y, &z, &x) + m.curvature_at(&p, &z, &x, &y);
        bianchi.push(cyc.norm() / rscale);

        let t = 0.37 + k as f64 * 0.013;
        let q = m.flow_at(&p, t);
        let (fx, fy) = (flow_push(m, &p, &x, t), flow_push(m, &p, &y, t));
        flow_g.push((m.g_at(&q, &fx, &fy) - g(&x, &y)).abs() / scale);
        flow_eta.push((m.eta_at(&q, &fx) - m.eta_at(&p, &x)).abs() / scale);
        let fphi = flow_push(m, &p, &m.phi_at(&p, &x), t);
        flow_phi.push((m.phi_at(&q, &fx) - fphi).norm() / scale);

        if k < expensive {
            let bf = oracle::curvature_fd(m, &p, &x, &y, &z);
            r_cross.push((bf - &rxy).norm() / rscale);
            let kf = oracle::connection_term_fd(m, &p, &x, &y);
            conn_cross.push((kf - m.connection_term(&p, &x, &y)).norm() / scale);
            let u = m.random_contact_unit(&mut rng, &p);
            let pu = m.phi_at(&p, &u);
            phi_sect.push((oracle::sectional_curvature_fd(m, &p, &u, &pu) - m.c()).abs());
            xi_sect.push((oracle::sectional_curvature_fd(m, &p, &u, &xi) - 1.0).abs());
        }
    }

    let checks: Vec<AxiomCheck> = [
        phi_sq, eta_xi, eta_g, compat, deta, nabla_xi, metric_compat, r_antisym, r_skew, bianchi,
        flow_g, flow_eta, flow_phi, r_cross, conn_cross, phi_sect, xi_sect,
    ]
    .into_iter()
    .map(Acc::finish)
    .collect();
    let passed = checks.iter().all(|c| c.passed);
    AxiomReport {
        model: m.descriptor(),
        seed,
        samples,
        checks,
        passed,
        elapsed_secs: start.elapsed().as_secs_f64(),
    }
}
