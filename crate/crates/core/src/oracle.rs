//! Brute-force local geometry from a coordinate chart.
//!
//! The metric is pulled back to a chart around a base point, Christoffel
//! symbols come from finite differences of the metric (Koszul formula), and
//! the Riemann tensor from finite differences of those Christoffels. None of
//! this uses the closed-form connection or curvature of [`SpaceFormModel`],
//! so it serves as an independent check of both.

use nalgebra::{DMatrix, DVector};

use crate::diff;
use crate::models::SpaceFormModel;

/// Default finite-difference step for chart computations.
pub const CHART_STEP: f64 = 1e-3;

/// Local chart around `base`.
///
/// Sphere carriers use `x ↦ (p₀ + Bx)/|p₀ + Bx|` with `B` an orthonormal
/// basis of `T_{p₀}S`; the flat model uses its global coordinates shifted to
/// `base`.
#[derive(Debug, Clone)]
pub struct Chart {
    model: SpaceFormModel,
    base: DVector<f64>,
    basis: DMatrix<f64>,
}

impl Chart {
    pub fn at(model: SpaceFormModel, base: &DVector<f64>) -> Self {
        let dim = model.dim();
        let basis = if model.is_sphere() {
            // Orthonormal complement of base by Gram–Schmidt on the standard basis.
            let amb = model.ambient_dim();
            let mut cols: Vec<DVector<f64>> = Vec::with_capacity(dim);
            let p = base / base.norm();
            for k in 0..amb {
                let mut e = DVector::zeros(amb);
                e[k] = 1.0;
                let mut w = &e - &p * p.dot(&e);
                for c in &cols {
                    w -= c * c.dot(&w);
                }
                let nrm = w.norm();
                if nrm > 1e-6 {
                    cols.push(w / nrm);
                }
                if cols.len() == dim {
                    break;
                }
            }
            DMatrix::from_columns(&cols)
        } else {
            DMatrix::identity(dim, dim)
        };
        Self {
            model,
            base: base.clone(),
            basis,
        }
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    /// Carrier point with chart coordinates `x`.
    pub fn point(&self, x: &DVector<f64>) -> DVector<f64> {
        let v = &self.base + &self.basis * x;
        if self.model.is_sphere() {
            &v / v.norm()
        } else {
            v
        }
    }

    /// Columns `∂ψ/∂x_i` at `x`.
    pub fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        if !self.model.is_sphere() {
            return self.basis.clone();
        }
        let v = &self.base + &self.basis * x;
        let r = v.norm();
        let u = &v / r;
        let mut jac = self.basis.clone();
        for i in 0..self.dim() {
            let b = self.basis.column(i).into_owned();
            let col = (&b - &u * u.dot(&b)) / r;
            jac.set_column(i, &col);
        }
        jac
    }

    /// Pulled-back metric matrix at `x`.
    pub fn metric(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let p = self.point(x);
        let jac = self.jacobian(x);
        let d = self.dim();
        let cols: Vec<DVector<f64>> = (0..d).map(|i| jac.column(i).into_owned()).collect();
        DMatrix::from_fn(d, d, |i, j| self.model.g_at(&p, &cols[i], &cols[j]))
    }

    /// Chart components of an ambient tangent vector at the chart origin.
    pub fn to_chart(&self, v: &DVector<f64>) -> DVector<f64> {
        self.basis.transpose() * v
    }

    /// Ambient vector for chart components at the chart origin.
    pub fn from_chart(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.basis * x
    }
}

/// Christoffel symbols `Γ[m][(i, j)]` at chart coordinates `x`, by
/// Richardson-extrapolated differences of the metric.
pub fn christoffel_fd(chart: &Chart, x: &DVector<f64>, h: f64) -> Vec<DMatrix<f64>> {
    let d = chart.dim();
    let dg: Vec<DMatrix<f64>> = (0..d)
        .map(|l| {
            diff::derivative_vec_fn(
                |t| {
                    let mut y = x.clone();
                    y[l] += t;
                    chart.metric(&y)
                },
                0.0,
                h,
                1,
            )
        })
        .collect();
    let ginv = chart
        .metric(x)
        .try_inverse()
        .expect("pulled-back metric is invertible");
    (0..d)
        .map(|m| {
            DMatrix::from_fn(d, d, |i, j| {
                0.5 * (0..d)
                    .map(|l| ginv[(m, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]))
                    .sum::<f64>()
            })
        })
        .collect()
}

/// Riemann tensor `R^l_{ijk}` (stored at `[l][i][j][k]`) with
/// `R(∂_i, ∂_j)∂_k = R^l_{ijk} ∂_l`.
#[derive(Debug, Clone)]
pub struct RiemannTensor {
    dim: usize,
    data: Vec<f64>,
}

impl RiemannTensor {
    fn idx(&self, l: usize, i: usize, j: usize, k: usize) -> usize {
        ((l * self.dim + i) * self.dim + j) * self.dim + k
    }

    pub fn get(&self, l: usize, i: usize, j: usize, k: usize) -> f64 {
        self.data[self.idx(l, i, j, k)]
    }

    /// `R(X,Y)Z` in chart components.
    pub fn apply(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> DVector<f64> {
        let d = self.dim;
        DVector::from_fn(d, |l, _| {
            let mut s = 0.0;
            for i in 0..d {
                for j in 0..d {
                    for k in 0..d {
                        s += self.get(l, i, j, k) * x[i] * y[j] * z[k];
                    }
                }
            }
            s
        })
    }
}

/// Brute-force Riemann tensor at chart coordinates `x`:
/// `R^l_{ijk} = ∂_iΓ^l_{jk} - ∂_jΓ^l_{ik} + Γ^l_{im}Γ^m_{jk} - Γ^l_{jm}Γ^m_{ik}`.
pub fn riemann_fd(chart: &Chart, x: &DVector<f64>, h: f64) -> RiemannTensor {
    let d = chart.dim();
    let gamma = christoffel_fd(chart, x, h);
    // dgamma[i][l] = ∂_i Γ^l
    let dgamma: Vec<Vec<DMatrix<f64>>> = (0..d)
        .map(|i| {
            let at = |t: f64| {
                let mut y = x.clone();
                y[i] += t;
                christoffel_fd(chart, &y, h)
            };
            let w = 1.0 / (12.0 * h);
            let (p2, p1, m1, m2) = (at(2.0 * h), at(h), at(-h), at(-2.0 * h));
            (0..d)
                .map(|l| (&p1[l] - &m1[l]) * (8.0 * w) - (&p2[l] - &m2[l]) * w)
                .collect()
        })
        .collect();
    let mut data = vec![0.0; d * d * d * d];
    for l in 0..d {
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let mut v = dgamma[i][l][(j, k)] - dgamma[j][l][(i, k)];
                    for m in 0..d {
                        v += gamma[l][(i, m)] * gamma[m][(j, k)] - gamma[l][(j, m)] * gamma[m][(i, k)];
                    }
                    data[((l * d + i) * d + j) * d + k] = v;
                }
            }
        }
    }
    RiemannTensor { dim: d, data }
}

/// Numerically measured sectional curvature of `span(X, Y)` at the chart origin.
pub fn sectional_curvature_fd(
    model: &SpaceFormModel,
    p: &DVector<f64>,
    x: &DVector<f64>,
    y: &DVector<f64>,
) -> f64 {
    let chart = Chart::at(*model, p);
    let o = DVector::zeros(chart.dim());
    let riem = riemann_fd(&chart, &o, CHART_STEP);
    let (cx, cy) = (chart.to_chart(x), chart.to_chart(y));
    let r = riem.apply(&cx, &cy, &cy);
    let g = chart.metric(&o);
    let num = cx.dot(&(&g * r));
    let den = cx.dot(&(&g * &cx)) * cy.dot(&(&g * &cy)) - cx.dot(&(&g * &cy)).powi(2);
    num / den
}

/// Brute-force `R(X,Y)Z` at `p` returned as an ambient tangent vector.
pub fn curvature_fd(
    model: &SpaceFormModel,
    p: &DVector<f64>,
    x: &DVector<f64>,
    y: &DVector<f64>,
    z: &DVector<f64>,
) -> DVector<f64> {
    let chart = Chart::at(*model, p);
    let o = DVector::zeros(chart.dim());
    let riem = riemann_fd(&chart, &o, CHART_STEP);
    let r = riem.apply(&chart.to_chart(x), &chart.to_chart(y), &chart.to_chart(z));
    chart.from_chart(&r)
}

/// Brute-force connection term `Γ(p; T, V)` at a carrier point via the
/// chart Koszul formula. The ambient field is `J(c(s)) V_chart` along the
/// chart curve `c(s) = s T_chart`, with constant chart components, so its
/// covariant derivative at `s = 0` is `Γ_chart(T, V)` mapped back to ambient
/// coordinates; subtracting the ambient derivative leaves the term.
pub fn connection_term_fd(
    model: &SpaceFormModel,
    p: &DVector<f64>,
    t: &DVector<f64>,
    v: &DVector<f64>,
) -> DVector<f64> {
    let chart = Chart::at(*model, p);
    let o = DVector::zeros(chart.dim());
    let gamma = christoffel_fd(&chart, &o, CHART_STEP);
    let (ct, cv) = (chart.to_chart(t), chart.to_chart(v));
    let cov = DVector::from_fn(chart.dim(), |m, _| ct.dot(&(&gamma[m] * &cv)));
    let cov_ambient = chart.from_chart(&cov);
    let field = |s: f64| chart.jacobian(&(&ct * s)) * &cv;
    let dfield = diff::derivative_vec_fn(field, 0.0, CHART_STEP, 2);
    cov_ambient - dfield
}

/// Zero of `f` on `[lo, hi]` by bisection; `f(lo)` and `f(hi)` must differ in sign.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// All sign changes of `f` on a uniform grid of `samples` points over
/// `(lo, hi)`, refined by bisection. Tangential zeros are missed.
pub fn scan_roots(f: impl Fn(f64) -> f64, lo: f64, hi: f64, samples: usize) -> Vec<f64> {
    let step = (hi - lo) / (samples - 1) as f64;
    let mut roots = Vec::new();
    let mut prev = (lo, f(lo));
    for k in 1..samples {
        let x = lo + k as f64 * step;
        let fx = f(x);
        if fx == 0.0 {
            roots.push(x);
        } else if prev.1 != 0.0 && (fx < 0.0) != (prev.1 < 0.0) {
            roots.push(bisect(&f, prev.0, x));
        }
        prev = (x, fx);
    }
    roots
}

/// Coefficients `[a, b, c]` of the quadratic `a t² + b t + c` through three samples.
pub fn quadratic_through(f: impl Fn(f64) -> f64, nodes: [f64; 3]) -> [f64; 3] {
    let [x0, x1, x2] = nodes;
    let m = nalgebra::Matrix3::new(x0 * x0, x0, 1.0, x1 * x1, x1, 1.0, x2 * x2, x2, 1.0);
    let rhs = nalgebra::Vector3::new(f(x0), f(x1), f(x2));
    let sol = m.lu().solve(&rhs).unwrap_or_else(nalgebra::Vector3::zeros);
    [sol[0], sol[1], sol[2]]
}

/// Real roots of `a t² + b t + c` in ascending order, via the cancellation-free
/// form `q = -(b + sign(b)√Δ)/2`, roots `q/a` and `c/q`.
pub fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 || a == 0.0 {
        return Vec::new();
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let mut r = if q == 0.0 { vec![0.0, 0.0] } else { vec![q / a, c / q] };
    r.sort_by(f64::total_cmp);
    r
}
