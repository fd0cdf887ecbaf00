//! Concrete Sasakian space forms.
//!
//! Three carriers are provided:
//!
//! * `UnitSphere`: `S^{2n+1} ⊂ R^{2n+2} = C^{n+1}` with `ξ = -𝕀p`,
//!   `φX = 𝕀X - η(X)p`, induced metric. `c = 1`.
//! * `DeformedSphere(a)`: the D-homothetic deformation `g' = a g + a(a-1) η⊗η`,
//!   `ξ' = ξ/a`, `η' = aη`, `φ' = φ` of the unit sphere. `c = 4/a - 3`.
//! * `FlatSasakian`: `R^{2n+1}` with coordinates `(x_1..x_n, y_1..y_n, z)`,
//!   `η = ½(dz - Σ y_i dx_i)`, `ξ = 2∂_z`, `g = η⊗η + ¼Σ(dx_i² + dy_i²)`. `c = -3`.
//!
//! The ambient complex structure pairs coordinates `(2k, 2k+1)`:
//! `𝕀(e_{2k}) = e_{2k+1}`, `𝕀(e_{2k+1}) = -e_{2k}`.
//!
//! Curvature follows `R(X,Y) = ∇_X∇_Y - ∇_Y∇_X - ∇_[X,Y]`, and the structure
//! satisfies `∇_X ξ = -φX`, `(∇_X φ)Y = g(X,Y)ξ - η(Y)X`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::diff::{self, Sampled};
use crate::error::{Error, Result};

/// Tolerance on `‖p‖ = 1` for points of sphere carriers.
pub const SPHERE_POINT_TOL: f64 = 1e-12;
/// Tolerance on `⟨p, X⟩ = 0` for tangent vectors of sphere carriers.
pub const SPHERE_TANGENT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ModelKind {
    UnitSphere,
    DeformedSphere { a: f64 },
    FlatSasakian,
}

/// A Sasakian space form of dimension `2n+1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceFormModel {
    kind: ModelKind,
    n: usize,
}

/// JSON descriptor `{kind, n, a?, c}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDescriptor {
    pub kind: String,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
}

/// Point of the carrier, in ambient (sphere) or chart (flat) coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientPoint {
    coords: DVector<f64>,
}

impl AmbientPoint {
    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn into_coords(self) -> DVector<f64> {
        self.coords
    }
}

/// Tangent vector attached to a base point.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    base: AmbientPoint,
    components: DVector<f64>,
}

impl TangentVector {
    pub fn base(&self) -> &AmbientPoint {
        &self.base
    }

    pub fn components(&self) -> &DVector<f64> {
        &self.components
    }
}

/// Multiplication by `i` on `C^{m}` written as `R^{2m}` with pairs `(2k, 2k+1)`.
pub fn complex_structure(v: &DVector<f64>) -> DVector<f64> {
    let mut out = DVector::zeros(v.len());
    for k in 0..v.len() / 2 {
        out[2 * k] = -v[2 * k + 1];
        out[2 * k + 1] = v[2 * k];
    }
    out
}

impl SpaceFormModel {
    pub fn unit_sphere(n: usize) -> Result<Self> {
        Self::new(ModelKind::UnitSphere, n)
    }

    pub fn deformed_sphere(a: f64, n: usize) -> Result<Self> {
        Self::new(ModelKind::DeformedSphere { a }, n)
    }

    pub fn flat(n: usize) -> Result<Self> {
        Self::new(ModelKind::FlatSasakian, n)
    }

    pub fn new(kind: ModelKind, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        if let ModelKind::DeformedSphere { a } = kind {
            if !(a.is_finite() && a > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "deformation parameter a must be positive, got {a}"
                )));
            }
        }
        Ok(Self { kind, n })
    }

    /// Model of constant φ-sectional curvature `c`: the unit sphere for `c = 1`,
    /// the flat model for `c = -3` and a deformed sphere with `a = 4/(c+3)`
    /// for every other `c > -3`.
    pub fn for_c(c: f64, n: usize) -> Result<Self> {
        if (c - 1.0).abs() < 1e-14 {
            Self::unit_sphere(n)
        } else if (c + 3.0).abs() < 1e-14 {
            Self::flat(n)
        } else if c > -3.0 {
            Self::deformed_sphere(4.0 / (c + 3.0), n)
        } else {
            Err(Error::Parameter(format!(
                "no model with φ-sectional curvature c = {c} < -3"
            )))
        }
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Manifold dimension `2n+1`.
    pub fn dim(&self) -> usize {
        2 * self.n + 1
    }

    /// Length of coordinate vectors.
    pub fn ambient_dim(&self) -> usize {
        match self.kind {
            ModelKind::FlatSasakian => 2 * self.n + 1,
            _ => 2 * self.n + 2,
        }
    }

    pub fn is_sphere(&self) -> bool {
        !matches!(self.kind, ModelKind::FlatSasakian)
    }

    /// Deformation parameter (1 for the unit sphere).
    fn a(&self) -> f64 {
        match self.kind {
            ModelKind::DeformedSphere { a } => a,
            _ => 1.0,
        }
    }

    /// Constant φ-sectional curvature.
    pub fn c(&self) -> f64 {
        match self.kind {
            ModelKind::UnitSphere => 1.0,
            ModelKind::DeformedSphere { a } => 4.0 / a - 3.0,
            ModelKind::FlatSasakian => -3.0,
        }
    }

    pub fn name(&self) -> String {
        match self.kind {
            ModelKind::UnitSphere => format!("UnitSphere(n={})", self.n),
            ModelKind::DeformedSphere { a } => format!("DeformedSphere(a={a}, n={})", self.n),
            ModelKind::FlatSasakian => format!("FlatSasakian(n={})", self.n),
        }
    }

    pub fn descriptor(&self) -> ModelDescriptor {
        let (kind, a) = match self.kind {
            ModelKind::UnitSphere => ("UnitSphere", None),
            ModelKind::DeformedSphere { a } => ("DeformedSphere", Some(a)),
            ModelKind::FlatSasakian => ("FlatSasakian", None),
        };
        ModelDescriptor {
            kind: kind.into(),
            n: self.n,
            a,
            c: Some(self.c()),
        }
    }

    pub fn from_descriptor(d: &ModelDescriptor) -> Result<Self> {
        let kind = match d.kind.as_str() {
            "UnitSphere" => ModelKind::UnitSphere,
            "DeformedSphere" => {
                let a = d.a.ok_or_else(|| {
                    Error::InvalidArgument("DeformedSphere descriptor requires a".into())
                })?;
                ModelKind::DeformedSphere { a }
            }
            "FlatSasakian" => ModelKind::FlatSasakian,
            other => {
                return Err(Error::InvalidArgument(format!("unknown model kind {other:?}")))
            }
        };
        let m = Self::new(kind, d.n)?;
        if let Some(c) = d.c {
            if (c - m.c()).abs() > 1e-9 * (1.0 + c.abs()) {
                return Err(Error::InvalidArgument(format!(
                    "descriptor c = {c} disagrees with derived c = {}",
                    m.c()
                )));
            }
        }
        Ok(m)
    }

    // ----- typed surface -------------------------------------------------

    /// Wraps coordinates as a point of the carrier.
    pub fn point(&self, coords: DVector<f64>) -> Result<AmbientPoint> {
        if coords.len() != self.ambient_dim() {
            return Err(Error::Dimension(format!(
                "point has {} coordinates, model expects {}",
                coords.len(),
                self.ambient_dim()
            )));
        }
        if self.is_sphere() && (coords.norm() - 1.0).abs() > SPHERE_POINT_TOL {
            return Err(Error::InvalidArgument(format!(
                "point is off the sphere: |p| = {}",
                coords.norm()
            )));
        }
        Ok(AmbientPoint { coords })
    }

    /// Wraps components as a tangent vector at `base`.
    pub fn tangent(&self, base: &AmbientPoint, components: DVector<f64>) -> Result<TangentVector> {
        if components.len() != self.ambient_dim() {
            return Err(Error::Dimension(format!(
                "vector has {} components, model expects {}",
                components.len(),
                self.ambient_dim()
            )));
        }
        if self.is_sphere() && base.coords.dot(&components).abs() > SPHERE_TANGENT_TOL {
            return Err(Error::InvalidArgument(
                "vector is not tangent to the sphere at its base point".into(),
            ));
        }
        Ok(TangentVector {
            base: base.clone(),
            components,
        })
    }

    fn same_base(&self, x: &TangentVector, y: &TangentVector) -> Result<()> {
        if x.base != y.base {
            return Err(Error::InvalidArgument(
                "tangent vectors have different base points".into(),
            ));
        }
        Ok(())
    }

    pub fn metric(&self, x: &TangentVector, y: &TangentVector) -> Result<f64> {
        self.same_base(x, y)?;
        Ok(self.g_at(&x.base.coords, &x.components, &y.components))
    }

    pub fn phi(&self, x: &TangentVector) -> TangentVector {
        TangentVector {
            base: x.base.clone(),
            components: self.phi_at(&x.base.coords, &x.components),
        }
    }

    pub fn xi(&self, p: &AmbientPoint) -> TangentVector {
        TangentVector {
            base: p.clone(),
            components: self.xi_at(&p.coords),
        }
    }

    pub fn eta(&self, x: &TangentVector) -> f64 {
        self.eta_at(&x.base.coords, &x.components)
    }

    /// `R(X,Y)Z` from the closed-form curvature tensor of `N(c)`.
    pub fn curvature_op(
        &self,
        x: &TangentVector,
        y: &TangentVector,
        z: &TangentVector,
    ) -> Result<TangentVector> {
        self.same_base(x, y)?;
        self.same_base(x, z)?;
        Ok(TangentVector {
            base: x.base.clone(),
            components: self.curvature_at(&x.base.coords, &x.components, &y.components, &z.components),
        })
    }

    pub fn xi_flow(&self, p: &AmbientPoint, t: f64) -> AmbientPoint {
        AmbientPoint {
            coords: self.flow_at(&p.coords, t),
        }
    }

    /// Sectional curvature of `span(X, Y)` from the closed-form tensor.
    pub fn sectional_curvature(&self, x: &TangentVector, y: &TangentVector) -> Result<f64> {
        self.same_base(x, y)?;
        let p = &x.base.coords;
        Ok(self.sectional_at(p, &x.components, &y.components))
    }

    // ----- raw coordinate surface --------------------------------------
    //
    // These accept arbitrary coordinates (also off the carrier); they are the
    // natural extensions used by finite-difference checks.

    /// Undeformed contact form `η₀(X) = -⟨X, 𝕀p⟩` of the round sphere.
    fn eta0(&self, p: &DVector<f64>, x: &DVector<f64>) -> f64 {
        -x.dot(&complex_structure(p))
    }

    /// Covector of η for the flat model: `½(-y, 0, 1)`.
    fn flat_eta_covector(&self, p: &DVector<f64>) -> DVector<f64> {
        let n = self.n;
        let mut w = DVector::zeros(2 * n + 1);
        for i in 0..n {
            w[i] = -0.5 * p[n + i];
        }
        w[2 * n] = 0.5;
        w
    }

    /// Metric matrix of the flat model.
    fn flat_metric_matrix(&self, p: &DVector<f64>) -> DMatrix<f64> {
        let w = self.flat_eta_covector(p);
        let mut g = &w * w.transpose();
        for i in 0..2 * self.n {
            g[(i, i)] += 0.25;
        }
        g
    }

    pub fn g_at(&self, p: &DVector<f64>, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        match self.kind {
            ModelKind::UnitSphere => x.dot(y),
            ModelKind::DeformedSphere { a } => {
                a * x.dot(y) + a * (a - 1.0) * self.eta0(p, x) * self.eta0(p, y)
            }
            ModelKind::FlatSasakian => {
                let w = self.flat_eta_covector(p);
                let mut s = w.dot(x) * w.dot(y);
                for i in 0..2 * self.n {
                    s += 0.25 * x[i] * y[i];
                }
                s
            }
        }
    }

    pub fn norm_at(&self, p: &DVector<f64>, x: &DVector<f64>) -> f64 {
        self.g_at(p, x, x).max(0.0).sqrt()
    }

    pub fn xi_at(&self, p: &DVector<f64>) -> DVector<f64> {
        match self.kind {
            ModelKind::FlatSasakian => {
                let mut v = DVector::zeros(2 * self.n + 1);
                v[2 * self.n] = 2.0;
                v
            }
            _ => complex_structure(p) * (-1.0 / self.a()),
        }
    }

    pub fn eta_at(&self, p: &DVector<f64>, x: &DVector<f64>) -> f64 {
        match self.kind {
            ModelKind::FlatSasakian => self.flat_eta_covector(p).dot(x),
            _ => self.a() * self.eta0(p, x),
        }
    }

    pub fn phi_at(&self, p: &DVector<f64>, x: &DVector<f64>) -> DVector<f64> {
        match self.kind {
            ModelKind::FlatSasakian => {
                let n = self.n;
                let mut v = DVector::zeros(2 * n + 1);
                let mut z = 0.0;
                for i in 0..n {
                    v[i] = x[n + i];
                    v[n + i] = -x[i];
                    z += p[n + i] * x[n + i];
                }
                v[2 * n] = z;
                v
            }
            _ => complex_structure(x) - p * self.eta0(p, x),
        }
    }

    /// Orthogonal projection onto the tangent space (identity for the flat model).
    pub fn project_tangent(&self, p: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        if self.is_sphere() {
            v - p * (p.dot(v) / p.norm_squared())
        } else {
            v.clone()
        }
    }

    /// Nearest carrier point (normalisation for sphere carriers).
    pub fn retract(&self, p: &DVector<f64>) -> DVector<f64> {
        if self.is_sphere() {
            p / p.norm()
        } else {
            p.clone()
        }
    }

    /// Connection term `Γ(p; T, V)` such that along a curve with velocity `T`
    /// the covariant derivative of a field `V` is `dV/ds + Γ(p; T, V)`.
    pub fn connection_term(&self, p: &DVector<f64>, t: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        match self.kind {
            ModelKind::UnitSphere => p * t.dot(v),
            ModelKind::DeformedSphere { a } => {
                // Levi-Civita of g' = ∇ - (a-1)(η₀(T)φV + η₀(V)φT).
                let base = p * t.dot(v);
                let corr = self.phi_at(p, v) * self.eta0(p, t) + self.phi_at(p, t) * self.eta0(p, v);
                base - corr * (a - 1.0)
            }
            ModelKind::FlatSasakian => self.flat_christoffel(p, t, v),
        }
    }

    /// `Γ^m_ij T^i V^j` for the flat model from the analytic metric derivatives.
    fn flat_christoffel(&self, p: &DVector<f64>, t: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        let n = self.n;
        let w = self.flat_eta_covector(p);
        // ∂_{y_k} w = -½ e_{x_k}; only y-derivatives of g are nonzero.
        let directional = |u: &DVector<f64>| {
            let mut d = DVector::zeros(2 * n + 1);
            for k in 0..n {
                d[k] = -0.5 * u[n + k];
            }
            d
        };
        let dt = directional(t);
        let dv = directional(v);
        // (∂_T G) V = dT (w·V) + w (dT·V)
        let term1 = &dt * w.dot(v) + &w * dt.dot(v);
        let term2 = &dv * w.dot(t) + &w * dv.dot(t);
        // q_l = T^T (∂_l G) V, nonzero for l = y_k
        let mut q = DVector::zeros(2 * n + 1);
        for k in 0..n {
            q[n + k] = -0.5 * (t[k] * w.dot(v) + w.dot(t) * v[k]);
        }
        let rhs = (term1 + term2 - q) * 0.5;
        let g = self.flat_metric_matrix(p);
        g.cholesky()
            .expect("flat metric is positive definite")
            .solve(&rhs)
    }

    /// Closed-form curvature of a Sasakian space form:
    ///
    /// ```text
    /// R(X,Y)Z = (c+3)/4 [g(Y,Z)X - g(X,Z)Y]
    ///   + (c-1)/4 [η(X)η(Z)Y - η(Y)η(Z)X + g(X,Z)η(Y)ξ - g(Y,Z)η(X)ξ
    ///              + g(φY,Z)φX - g(φX,Z)φY + 2g(X,φY)φZ]
    /// ```
    pub fn curvature_at(
        &self,
        p: &DVector<f64>,
        x: &DVector<f64>,
        y: &DVector<f64>,
        z: &DVector<f64>,
    ) -> DVector<f64> {
        let c = self.c();
        let g = |u: &DVector<f64>, v: &DVector<f64>| self.g_at(p, u, v);
        let (ex, ey, ez) = (self.eta_at(p, x), self.eta_at(p, y), self.eta_at(p, z));
        let xi = self.xi_at(p);
        let (px, py, pz) = (self.phi_at(p, x), self.phi_at(p, y), self.phi_at(p, z));
        let first = x * g(y, z) - y * g(x, z);
        let second = y * (ex * ez) - x * (ey * ez) + &xi * (g(x, z) * ey) - &xi * (g(y, z) * ex)
            + &px * g(&py, z)
            - &py * g(&px, z)
            + pz * (2.0 * g(x, &py));
        first * ((c + 3.0) / 4.0) + second * ((c - 1.0) / 4.0)
    }

    pub fn sectional_at(&self, p: &DVector<f64>, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        let r = self.curvature_at(p, x, y, y);
        let num = self.g_at(p, &r, x);
        let den = self.g_at(p, x, x) * self.g_at(p, y, y) - self.g_at(p, x, y).powi(2);
        num / den
    }

    /// Flow of ξ.
    pub fn flow_at(&self, p: &DVector<f64>, t: f64) -> DVector<f64> {
        match self.kind {
            ModelKind::FlatSasakian => {
                let mut q = p.clone();
                q[2 * self.n] += 2.0 * t;
                q
            }
            _ => {
                // dp/dt = -𝕀p / a  ⇒  p(t) = cos(t/a) p - sin(t/a) 𝕀p
                let theta = t / self.a();
                p * theta.cos() - complex_structure(p) * theta.sin()
            }
        }
    }

    /// Smallest positive period of the ξ-flow, if the orbits are closed.
    pub fn xi_period(&self) -> Option<f64> {
        match self.kind {
            ModelKind::FlatSasakian => None,
            _ => Some(2.0 * std::f64::consts::PI * self.a()),
        }
    }

    /// Gram–Schmidt in the model metric. Vectors with residual below `1e-12`
    /// relative norm are reported as an error.
    pub fn orthonormalize(&self, p: &DVector<f64>, vectors: &[DVector<f64>]) -> Result<Vec<DVector<f64>>> {
        let mut out: Vec<DVector<f64>> = Vec::with_capacity(vectors.len());
        for v in vectors {
            let mut w = self.project_tangent(p, v);
            for _ in 0..2 {
                for e in &out {
                    let c = self.g_at(p, &w, e);
                    w -= e * c;
                }
            }
            let nrm = self.norm_at(p, &w);
            if nrm < 1e-12 * (1.0 + self.norm_at(p, v)) {
                return Err(Error::InvalidArgument(
                    "vectors are linearly dependent".into(),
                ));
            }
            out.push(w / nrm);
        }
        Ok(out)
    }

    /// Random carrier point (uniform on spheres, uniform box `[-1,1]^{2n+1}` for flat).
    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        let d = self.ambient_dim();
        match self.kind {
            ModelKind::FlatSasakian => DVector::from_fn(d, |_, _| rng.random_range(-1.0..1.0)),
            _ => {
                let v = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
                &v / v.norm()
            }
        }
    }

    /// Random (Gaussian, projected) tangent vector at `p`.
    pub fn random_tangent<R: Rng + ?Sized>(&self, rng: &mut R, p: &DVector<f64>) -> DVector<f64> {
        let d = self.ambient_dim();
        let v = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
        self.project_tangent(p, &v)
    }

    /// Random unit contact vector (`η(X) = 0`, `g(X,X) = 1`) at `p`.
    pub fn random_contact_unit<R: Rng + ?Sized>(&self, rng: &mut R, p: &DVector<f64>) -> DVector<f64> {
        let xi = self.xi_at(p);
        loop {
            let v = self.random_tangent(rng, p);
            let w = &v - &xi * self.eta_at(p, &v);
            let nrm = self.norm_at(p, &w);
            if nrm > 1e-3 {
                return w / nrm;
            }
        }
    }

    /// Covariant derivative `∇_T V` of a field sampled along a curve.
    ///
    /// `points` are the master-grid curve samples, `velocity` the sampled
    /// `T = γ'`. The result is valid where the derivative stencil of `field`
    /// fits and `velocity` is defined.
    pub fn covariant_derivative(
        &self,
        points: &[DVector<f64>],
        velocity: &Sampled<DVector<f64>>,
        field: &Sampled<DVector<f64>>,
        h: f64,
        levels: usize,
    ) -> Result<Sampled<DVector<f64>>> {
        let dv = diff::derivative(field, h, levels)?;
        let range = diff::common_range([dv.range(), velocity.range(), 0..points.len()]);
        if range.is_empty() {
            return Err(Error::Stencil {
                needed: 1,
                available: 0,
            });
        }
        let out = range
            .clone()
            .map(|k| dv.at(k) + self.connection_term(&points[k], velocity.at(k), field.at(k)))
            .collect();
        Ok(Sampled::new(range.start, out))
    }
}
