//! The Ricci condition `K ΔK - |∇K|² - 4K³ = 0` on surface metrics in
//! coordinates `(t, u)`.
//!
//! Three independent evaluations: finite differences of `K` against the exact
//! metric, closed forms for diagonal metrics `(λ² + u²) dt² + du²`, and the
//! coefficient tables of the metric family
//! `(f² + u²) dt² + 2δ dt du + du²` with `δ = sqrt(f² - λ²)`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::curve::Interval;
use crate::error::{Error, Result};
use crate::expr::Expression;
use crate::jet::Jet3;
use crate::ruled::{first_fundamental_form, gauss_curvature_closed, MetricSample, RuledPatch};

/// Added to `|K|³` before normalizing residuals.
pub const NORMALIZATION_EPSILON: f64 = 1e-30;
pub const DEFAULT_STEP: f64 = 1e-3;
pub const DEFAULT_THRESHOLD: f64 = 1e-3;
/// Fraction of each side trimmed off when building an interior grid.
pub const INTERIOR_INSET: f64 = 0.1;

/// A function of `t` with three exact derivatives.
#[derive(Clone)]
pub struct ScalarFn {
    eval: Arc<dyn Fn(f64) -> Result<Jet3> + Send + Sync>,
    label: String,
}

impl fmt::Debug for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ScalarFn({})", self.label)
    }
}

impl ScalarFn {
    pub fn new(label: impl Into<String>, eval: impl Fn(f64) -> Result<Jet3> + Send + Sync + 'static) -> Self {
        ScalarFn { eval: Arc::new(eval), label: label.into() }
    }

    pub fn constant(c: f64) -> Self {
        ScalarFn::new(format!("{c}"), move |_| Ok(Jet3::constant(c)))
    }

    pub fn from_expression(expr: Expression, bindings: BTreeMap<String, f64>) -> Result<Self> {
        let values = expr.bind(&bindings)?;
        let label = expr.source().to_string();
        Ok(ScalarFn::new(label, move |t| Ok(expr.eval_resolved(t, &values)?)))
    }

    pub fn parse(source: &str) -> Result<Self> {
        ScalarFn::from_expression(Expression::of_t(source)?, BTreeMap::new())
    }

    pub fn jet(&self, t: f64) -> Result<Jet3> {
        let j = (self.eval)(t)?;
        if !j.is_finite() {
            return Err(Error::NonFinite(format!("{} at t = {t}", self.label)));
        }
        Ok(j)
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricSource {
    Patch(String),
    Ansatz { f: String, lambda: String },
    Custom(String),
}

type MetricFn = Arc<dyn Fn(f64, f64) -> Result<MetricSample> + Send + Sync>;
type FieldFn = Arc<dyn Fn(f64, f64) -> Result<f64> + Send + Sync>;

/// A metric `E dt² + 2F dt du + G du²` together with its curvature `K`.
#[derive(Clone)]
pub struct MetricField {
    metric: MetricFn,
    curvature: FieldFn,
    t_range: Interval,
    u_range: Interval,
    source: MetricSource,
}

impl fmt::Debug for MetricField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricField")
            .field("t_range", &self.t_range)
            .field("u_range", &self.u_range)
            .field("source", &self.source)
            .finish()
    }
}

impl MetricField {
    pub fn new(
        source: MetricSource,
        t_range: Interval,
        u_range: Interval,
        metric: impl Fn(f64, f64) -> Result<MetricSample> + Send + Sync + 'static,
        curvature: impl Fn(f64, f64) -> Result<f64> + Send + Sync + 'static,
    ) -> Self {
        MetricField { metric: Arc::new(metric), curvature: Arc::new(curvature), t_range, u_range, source }
    }

    /// Induced metric of a patch; `K` from the distribution parameter.
    pub fn from_patch(patch: &RuledPatch) -> Self {
        let (p1, p2) = (patch.clone(), patch.clone());
        MetricField::new(
            MetricSource::Patch(patch.label().to_string()),
            patch.t_range(),
            patch.u_range(),
            move |t, u| first_fundamental_form(&p1, t, u),
            move |t, u| gauss_curvature_closed(&p2, t, u),
        )
    }

    /// `(f² + u²) dt² + 2 sqrt(f² - λ²) dt du + du²` with `K = -λ²/(λ² + u²)²`.
    pub fn from_ansatz(f: ScalarFn, lambda: ScalarFn, t_range: Interval, u_range: Interval) -> Self {
        let source = MetricSource::Ansatz { f: f.label().to_string(), lambda: lambda.label().to_string() };
        let l2 = lambda.clone();
        MetricField::new(
            source,
            t_range,
            u_range,
            move |t, u| {
                let (fv, lv) = (f.jet(t)?.d0, lambda.jet(t)?.d0);
                let d2 = fv * fv - lv * lv;
                if d2 < 0.0 {
                    return Err(Error::NegativeDelta(d2));
                }
                Ok(MetricSample::new(fv * fv + u * u, d2.sqrt(), 1.0))
            },
            move |t, u| {
                let l = l2.jet(t)?.d0;
                let e = l * l + u * u;
                Ok(-l * l / (e * e))
            },
        )
    }

    pub fn metric(&self, t: f64, u: f64) -> Result<MetricSample> {
        let m = (self.metric)(t, u)?;
        if m.detg.is_nan() || m.detg <= 0.0 || !m.e.is_finite() || !m.f.is_finite() || !m.g.is_finite() {
            return Err(Error::Degenerate { t, u, what: "metric is not positive definite" });
        }
        Ok(m)
    }

    pub fn curvature(&self, t: f64, u: f64) -> Result<f64> {
        let k = (self.curvature)(t, u)?;
        if !k.is_finite() {
            return Err(Error::NonFinite(format!("curvature at ({t}, {u})")));
        }
        Ok(k)
    }

    pub fn t_range(&self) -> Interval {
        self.t_range
    }

    pub fn u_range(&self) -> Interval {
        self.u_range
    }

    pub fn source(&self) -> &MetricSource {
        &self.source
    }

    fn check_margin(&self, t: f64, u: f64, h: f64) -> Result<()> {
        if h.is_nan() || h <= 0.0 {
            return Err(Error::InvalidArgument(format!("finite-difference step must be positive, got {h}")));
        }
        let m = 2.0 * h;
        let inside = |r: Interval, x: f64| {
            x - m >= r.lo - 1e-12 * (1.0 + r.lo.abs()) && x + m <= r.hi + 1e-12 * (1.0 + r.hi.abs())
        };
        if inside(self.t_range, t) && inside(self.u_range, u) {
            Ok(())
        } else {
            Err(Error::Margin { t, u, h })
        }
    }
}

/// `g^{ij} ∂i K ∂j K` with central differences of step `h`.
pub fn grad_norm_sq(field: &MetricField, t: f64, u: f64, h: f64) -> Result<f64> {
    field.check_margin(t, u, h)?;
    let k = |t, u| field.curvature(t, u);
    let kt = (k(t + h, u)? - k(t - h, u)?) / (2.0 * h);
    let ku = (k(t, u + h)? - k(t, u - h)?) / (2.0 * h);
    let [gtt, gtu, guu] = field.metric(t, u)?.inverse();
    Ok(gtt * kt * kt + 2.0 * gtu * kt * ku + guu * ku * ku)
}

/// Intrinsic `K` from `E, F, G` alone (Brioschi formula), with central
/// differences of step `h`. Independent of both the closed form and the
/// second fundamental form.
pub fn gauss_curvature_brioschi(field: &MetricField, t: f64, u: f64, h: f64) -> Result<f64> {
    field.check_margin(t, u, h)?;
    let m = |dt: f64, du: f64| field.metric(t + dt * h, u + du * h);
    let c = m(0.0, 0.0)?;
    let (tp, tm, up, um) = (m(1.0, 0.0)?, m(-1.0, 0.0)?, m(0.0, 1.0)?, m(0.0, -1.0)?);
    let (pp, pm, mp, mm) = (m(1.0, 1.0)?, m(1.0, -1.0)?, m(-1.0, 1.0)?, m(-1.0, -1.0)?);
    let d = |a: f64, b: f64| (a - b) / (2.0 * h);
    let (e_t, e_u) = (d(tp.e, tm.e), d(up.e, um.e));
    let (f_t, f_u) = (d(tp.f, tm.f), d(up.f, um.f));
    let (g_t, g_u) = (d(tp.g, tm.g), d(up.g, um.g));
    let e_uu = (up.e - 2.0 * c.e + um.e) / (h * h);
    let g_tt = (tp.g - 2.0 * c.g + tm.g) / (h * h);
    let f_tu = (pp.f - pm.f - mp.f + mm.f) / (4.0 * h * h);
    let det3 = |a: [[f64; 3]; 3]| {
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    };
    let first = det3([
        [-0.5 * e_uu + f_tu - 0.5 * g_tt, 0.5 * e_t, f_t - 0.5 * e_u],
        [f_u - 0.5 * g_t, c.e, c.f],
        [0.5 * g_u, c.f, c.g],
    ]);
    let second = det3([[0.0, 0.5 * e_u, 0.5 * g_t], [0.5 * e_u, c.e, c.f], [0.5 * g_t, c.f, c.g]]);
    Ok((first - second) / (c.detg * c.detg))
}

/// `√detg · g^{ij}` at a point, as `(A^{tt}, A^{tu}, A^{uu})`.
fn flux_tensor(field: &MetricField, t: f64, u: f64) -> Result<[f64; 3]> {
    let m = field.metric(t, u)?;
    let s = m.detg.sqrt();
    Ok([m.g / s, -m.f / s, m.e / s])
}

/// `(1/√detg) ∂i(√detg g^{ij} ∂j K)` on a staggered stencil: fluxes live on
/// half-step points, tangential derivatives there are averaged central
/// differences. Second order in `h`.
pub fn laplace_beltrami(field: &MetricField, t: f64, u: f64, h: f64) -> Result<f64> {
    field.check_margin(t, u, h)?;
    let mut k = [[0.0; 3]; 3];
    for (i, row) in k.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = field.curvature(t + (i as f64 - 1.0) * h, u + (j as f64 - 1.0) * h)?;
        }
    }
    let hh = 0.5 * h;
    // t-fluxes at (t ± h/2, u)
    let mut div = 0.0;
    for (side, sign) in [(1usize, 1.0), (0usize, -1.0)] {
        let (a, b) = (side, side + 1);
        let kt = (k[b][1] - k[a][1]) / h;
        let ku = (k[a][2] - k[a][0] + k[b][2] - k[b][0]) / (4.0 * h);
        let [att, atu, _] = flux_tensor(field, t + sign * hh, u)?;
        div += sign * (att * kt + atu * ku) / h;
    }
    // u-fluxes at (t, u ± h/2)
    for (side, sign) in [(1usize, 1.0), (0usize, -1.0)] {
        let (a, b) = (side, side + 1);
        let ku = (k[1][b] - k[1][a]) / h;
        let kt = (k[2][a] - k[0][a] + k[2][b] - k[0][b]) / (4.0 * h);
        let [_, atu, auu] = flux_tensor(field, t, u + sign * hh)?;
        div += sign * (atu * kt + auu * ku) / h;
    }
    Ok(div / field.metric(t, u)?.detg.sqrt())
}

/// `K ΔK - |∇K|² - 4K³` by finite differences.
pub fn residual_fd(field: &MetricField, t: f64, u: f64, h: f64) -> Result<f64> {
    let k = field.curvature(t, u)?;
    let lap = laplace_beltrami(field, t, u, h)?;
    let grad = grad_norm_sq(field, t, u, h)?;
    Ok(k * lap - grad - 4.0 * k * k * k)
}

pub fn normalize(residual: f64, k: f64) -> f64 {
    residual / (k.abs().powi(3) + NORMALIZATION_EPSILON)
}

/// Tensor grid of evaluation points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub nt: usize,
    pub nu: usize,
    pub t: Interval,
    pub u: Interval,
}

impl GridSpec {
    pub fn new(nt: usize, nu: usize, t: Interval, u: Interval) -> Result<Self> {
        if nt == 0 || nu == 0 {
            return Err(Error::InvalidArgument(format!("grid must be non-empty, got {nt}x{nu}")));
        }
        Ok(GridSpec { nt, nu, t, u })
    }

    /// `nt × nu` points on the field's rectangle with 10% trimmed from every side.
    pub fn interior(field: &MetricField, nt: usize, nu: usize) -> Result<Self> {
        GridSpec::new(nt, nu, field.t_range().inset(INTERIOR_INSET), field.u_range().inset(INTERIOR_INSET))
    }

    pub fn points(&self) -> Vec<(f64, f64)> {
        let us = self.u.linspace(self.nu);
        self.t.linspace(self.nt).into_iter().flat_map(|t| us.iter().map(move |&u| (t, u))).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualPoint {
    pub t: f64,
    pub u: f64,
    pub k: f64,
    pub residual: f64,
    pub normalized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RicciReport {
    pub grid: GridSpec,
    pub h: f64,
    pub max_normalized_residual: f64,
    pub mean_normalized_residual: f64,
    pub max_abs_residual: f64,
    /// `(t, u)` where the normalized residual is largest.
    pub worst_point: (f64, f64),
    /// Maximum normalized residual at `h/2`, when refined.
    pub refined_max_normalized_residual: Option<f64>,
    /// `log2(max|r_h| / max|r_{h/2}|)` on the same points; assumes the exact residual is zero.
    pub convergence_order: Option<f64>,
    #[serde(skip)]
    pub points: Vec<ResidualPoint>,
}

impl RicciReport {
    pub fn passes(&self, threshold: f64) -> bool {
        self.max_normalized_residual <= threshold
    }
}

fn residual_points(field: &MetricField, grid: &GridSpec, h: f64) -> Result<Vec<ResidualPoint>> {
    grid.points()
        .into_par_iter()
        .map(|(t, u)| {
            let k = field.curvature(t, u)?;
            let residual = residual_fd(field, t, u, h)?;
            if !residual.is_finite() {
                return Err(Error::NonFinite(format!("Ricci residual at ({t}, {u})")));
            }
            Ok(ResidualPoint { t, u, k, residual, normalized: normalize(residual, k) })
        })
        .collect()
}

fn max_abs_residual(points: &[ResidualPoint]) -> f64 {
    points.iter().map(|p| p.residual.abs()).fold(0.0, f64::max)
}

/// Residual on every grid point at step `h`.
pub fn ricci_residual_fd(field: &MetricField, grid: &GridSpec, h: f64) -> Result<RicciReport> {
    let points = residual_points(field, grid, h)?;
    let worst = points
        .iter()
        .max_by(|a, b| a.normalized.abs().total_cmp(&b.normalized.abs()))
        .ok_or_else(|| Error::InvalidArgument("empty grid".into()))?;
    let mean = points.iter().map(|p| p.normalized.abs()).sum::<f64>() / points.len() as f64;
    Ok(RicciReport {
        grid: *grid,
        h,
        max_normalized_residual: worst.normalized.abs(),
        mean_normalized_residual: mean,
        max_abs_residual: max_abs_residual(&points),
        worst_point: (worst.t, worst.u),
        refined_max_normalized_residual: None,
        convergence_order: None,
        points,
    })
}

/// [`ricci_residual_fd`] at `h` plus a second pass at `h/2` for the convergence order.
pub fn ricci_residual_fd_refined(field: &MetricField, grid: &GridSpec, h: f64) -> Result<RicciReport> {
    let mut report = ricci_residual_fd(field, grid, h)?;
    let fine = residual_points(field, grid, 0.5 * h)?;
    report.refined_max_normalized_residual = Some(fine.iter().map(|p| p.normalized.abs()).fold(0.0, f64::max));
    report.convergence_order = Some((report.max_abs_residual / max_abs_residual(&fine)).log2());
    Ok(report)
}

/// Closed-form pieces for `(λ² + u²) dt² + du²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedFormTerms {
    pub k: f64,
    pub grad_norm_sq: f64,
    pub k_laplace_k: f64,
    pub residual: f64,
}

pub fn closed_form_terms(lambda: &ScalarFn, t: f64, u: f64) -> Result<ClosedFormTerms> {
    let j = lambda.jet(t)?;
    let (l, l1, l2) = (j.d0, j.d1, j.d2);
    let (ls, l1s) = (l * l, l1 * l1);
    let e = ls + u * u;
    if e == 0.0 {
        return Err(Error::Degenerate { t, u, what: "lambda^2 + u^2 vanishes" });
    }
    let (u2, u4) = (u * u, u.powi(4));
    let e7 = e.powi(7);
    let grad = 4.0 * ls / e7 * ((4.0 * ls + l1s) * u4 + (4.0 * ls * ls - 2.0 * ls * l1s) * u2 + ls * ls * l1s);
    let klk = 2.0 * ls / e7
        * ((8.0 * ls + l1s + l * l2) * u4 + (6.0 * ls * ls - 9.0 * ls * l1s) * u2 - 2.0 * ls.powi(3)
            + 4.0 * ls * ls * l1s
            - ls * ls * l * l2);
    let minus_4k3 = 4.0 * ls.powi(3) / e.powi(6);
    Ok(ClosedFormTerms { k: -ls / (e * e), grad_norm_sq: grad, k_laplace_k: klk, residual: klk - grad + minus_4k3 })
}

/// Ricci residual of `(λ² + u²) dt² + du²` from the closed forms.
pub fn closed_form_residual(lambda: &ScalarFn, t: f64, u: f64) -> Result<f64> {
    Ok(closed_form_terms(lambda, t, u)?.residual)
}

/// Coefficients of `u⁴, u², u⁰` in the reduced condition for diagonal metrics.
pub fn polynomial2_coefficients(lambda: &ScalarFn, t: f64) -> Result<[f64; 3]> {
    let j = lambda.jet(t)?;
    let (l, l1, l2) = (j.d0, j.d1, j.d2);
    Ok([l1 * l1 - l * l2, 5.0 * l * l * l1 * l1, -l.powi(4) * (2.0 * l1 * l1 - l * l2)])
}

/// The same residual as `-(2λ²/(λ² + u²)⁷) · P(u)` with `P` from [`polynomial2_coefficients`].
pub fn polynomial2_residual(lambda: &ScalarFn, t: f64, u: f64) -> Result<f64> {
    let [p4, p2, p0] = polynomial2_coefficients(lambda, t)?;
    let l = lambda.jet(t)?.d0;
    let e = l * l + u * u;
    Ok(-2.0 * l * l / e.powi(7) * (p4 * u.powi(4) + p2 * u * u + p0))
}

/// Coefficient tables at one `t`; index `i` multiplies `u^i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaCoefficients {
    pub t: f64,
    pub f: f64,
    pub lambda: f64,
    pub delta: f64,
    pub a: [f64; 5],
    pub b: [f64; 5],
    pub c: [f64; 5],
}

fn poly(c: &[f64; 5], u: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &x| acc * u + x)
}

impl LemmaCoefficients {
    fn e(&self, u: f64) -> f64 {
        self.lambda * self.lambda + u * u
    }

    /// `|∇K|² = 4λ²/(λ² + u²)⁷ · Σ a_i u^i`, valid for every `δ`.
    pub fn grad_norm_sq(&self, u: f64) -> f64 {
        4.0 * self.lambda * self.lambda / self.e(u).powi(7) * poly(&self.a, u)
    }

    /// `K ΔK = -2λ²/(δ (λ² + u²)⁷) · Σ b_i u^i`; needs `δ ≠ 0`.
    pub fn k_laplace_k(&self, u: f64) -> Result<f64> {
        self.require_delta()?;
        Ok(-2.0 * self.lambda * self.lambda / (self.delta * self.e(u).powi(7)) * poly(&self.b, u))
    }

    /// Residual assembled from the `a` and `b` tables.
    pub fn residual_from_ab(&self, u: f64) -> Result<f64> {
        let l2 = self.lambda * self.lambda;
        Ok(self.k_laplace_k(u)? - self.grad_norm_sq(u) + 4.0 * l2.powi(3) / self.e(u).powi(6))
    }

    /// Residual `Σ c_i u^i / (δ (λ² + u²)⁷)`.
    pub fn residual_from_c(&self, u: f64) -> Result<f64> {
        self.require_delta()?;
        Ok(poly(&self.c, u) / (self.delta * self.e(u).powi(7)))
    }

    /// `c1/(2λ⁵) - c3/(2λ³)`, which the tables force to equal `-12 δ² λ'`.
    pub fn c1_c3_combination(&self) -> f64 {
        self.c[1] / (2.0 * self.lambda.powi(5)) - self.c[3] / (2.0 * self.lambda.powi(3))
    }

    fn require_delta(&self) -> Result<()> {
        if self.delta == 0.0 {
            return Err(Error::InvalidArgument(
                "coefficient tables divide by delta; use the diagonal closed forms when f^2 = lambda^2".into(),
            ));
        }
        Ok(())
    }
}

pub fn lemma_coefficients(f: &ScalarFn, lambda: &ScalarFn, t: f64) -> Result<LemmaCoefficients> {
    let fj = f.jet(t)?;
    let lj = lambda.jet(t)?;
    let (fv, l, l1, l2) = (fj.d0, lj.d0, lj.d1, lj.d2);
    let f2 = fv * fv;
    let f2p = 2.0 * fv * fj.d1;
    let d2 = f2 - l * l;
    if d2 < 0.0 {
        return Err(Error::NegativeDelta(d2));
    }
    let d = d2.sqrt();
    let (ls, l1s) = (l * l, l1 * l1);
    let a = [ls * ls * l1s, -4.0 * d * ls * l * l1, 2.0 * ls * (2.0 * f2 - l1s), 4.0 * d * l * l1, 4.0 * ls + l1s];
    let b = [
        d * ls * ls * (l * l2 + 2.0 * f2 - 4.0 * l1s),
        ls * l * (-17.0 * ls * l1 - l * f2p + 19.0 * f2 * l1),
        3.0 * d * ls * (2.0 * ls - 4.0 * f2 + 3.0 * l1s),
        l * (11.0 * ls * l1 - l * f2p - 9.0 * f2 * l1),
        d * (-8.0 * ls - l1s - l * l2),
    ];
    let c = [
        2.0 * d * ls.powi(3) * (2.0 * ls - 2.0 * f2 + 2.0 * l1s - l * l2),
        2.0 * ls * ls * l * (9.0 * ls * l1 - 11.0 * f2 * l1 + l * f2p),
        2.0 * d * ls * ls * (-4.0 * ls + 4.0 * f2 - 5.0 * l1s),
        2.0 * ls * l * (-3.0 * ls * l1 + f2 * l1 + l * f2p),
        2.0 * d * ls * (l * l2 - l1s),
    ];
    Ok(LemmaCoefficients { t, f: fv, lambda: l, delta: d, a, b, c })
}

/// Residual of the `(f, λ)` family by the route that is valid there: the
/// `c` table when `δ > 0`, the diagonal closed forms when `δ = 0`.
pub fn lemma_residual(f: &ScalarFn, lambda: &ScalarFn, t: f64, u: f64) -> Result<f64> {
    let coeffs = lemma_coefficients(f, lambda, t)?;
    if coeffs.delta > 0.0 {
        coeffs.residual_from_c(u)
    } else {
        closed_form_residual(lambda, t, u)
    }
}
