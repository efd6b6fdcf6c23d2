//! Ruled surfaces `X(t, u) = α(t) + u β(t)`.
//!
//! Closed forms assume the usual gauge `|β| = |β'| = 1`, `<β, β'> = 0`, with
//! `α` the line of striction. Those conditions are checked, never repaired.

use nalgebra::Vector3;
use rayon::prelude::*;
use serde::Serialize;

use crate::curve::{CurveEval, Interval, SpaceCurve};
use crate::error::{Error, Result};
use crate::frenet::{frenet, frenet_from_jet, frenet_regular, MIN_SPEED};
use crate::jet::CurveJet;

pub const NORMALIZATION_TOLERANCE: f64 = 1e-8;
pub const CLASSIFY_TOLERANCE: f64 = 1e-7;
pub const DEVELOPABLE_TOLERANCE: f64 = 1e-9;
/// Allowed `|β ∓ B_frenet|` before a patch is refused as non-canonical.
pub const BINORMAL_TOLERANCE: f64 = 1e-6;

/// What is known about how a patch was generated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Canonical {
    /// Arbitrary generating curves.
    None,
    /// `α` has constant torsion `τ0` and `β` is its binormal.
    ConstantTorsion(f64),
    /// Straight striction line with rulings orthogonal to it.
    Helicoid,
}

#[derive(Debug, Clone)]
pub struct RuledPatch {
    alpha: SpaceCurve,
    beta: SpaceCurve,
    t_range: Interval,
    u_range: Interval,
    canonical: Canonical,
    label: String,
}

impl RuledPatch {
    pub fn new(alpha: SpaceCurve, beta: SpaceCurve, t_range: Interval, u_range: Interval) -> Result<Self> {
        for (name, c) in [("alpha", &alpha), ("beta", &beta)] {
            if !c.domain().contains_interval(&t_range) {
                return Err(Error::InvalidArgument(format!(
                    "t-range {t_range} is not inside the domain {} of {name}",
                    c.domain()
                )));
            }
        }
        let label = format!("{} + u {}", alpha.label(), beta.label());
        Ok(RuledPatch { alpha, beta, t_range, u_range, canonical: Canonical::None, label })
    }

    pub fn with_canonical(mut self, canonical: Canonical) -> Self {
        self.canonical = canonical;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn alpha(&self) -> &SpaceCurve {
        &self.alpha
    }

    pub fn beta(&self) -> &SpaceCurve {
        &self.beta
    }

    pub fn t_range(&self) -> Interval {
        self.t_range
    }

    pub fn u_range(&self) -> Interval {
        self.u_range
    }

    pub fn canonical(&self) -> Canonical {
        self.canonical
    }

    pub fn torsion(&self) -> Option<f64> {
        match self.canonical {
            Canonical::ConstantTorsion(tau) => Some(tau),
            _ => None,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Same surface on a sub-rectangle.
    pub fn restrict(&self, t_range: Interval, u_range: Interval) -> Result<Self> {
        let mut p = RuledPatch::new(self.alpha.clone(), self.beta.clone(), t_range, u_range)?;
        p.canonical = self.canonical;
        p.label = self.label.clone();
        Ok(p)
    }

    pub fn jets(&self, t: f64) -> Result<(CurveJet, CurveJet)> {
        Ok((self.alpha.jet(t)?, self.beta.jet(t)?))
    }

    pub fn point(&self, t: f64, u: f64) -> Result<Vector3<f64>> {
        let (a, b) = self.jets(t)?;
        Ok(a.pos + b.pos * u)
    }

    /// `X_t ∧ X_u ≠ 0` on an `n × n` probe grid.
    pub fn is_immersion(&self, n: usize) -> Result<bool> {
        for t in self.t_range.linspace(n) {
            let (a, b) = self.jets(t)?;
            for u in self.u_range.linspace(n) {
                if (a.d1 + b.d1 * u).cross(&b.pos).norm() < MIN_SPEED {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// First fundamental form at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricSample {
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub detg: f64,
}

impl MetricSample {
    pub fn new(e: f64, f: f64, g: f64) -> Self {
        MetricSample { e, f, g, detg: e * g - f * f }
    }

    /// `(g^{tt}, g^{tu}, g^{uu})`.
    pub fn inverse(&self) -> [f64; 3] {
        [self.g / self.detg, -self.f / self.detg, self.e / self.detg]
    }
}

/// Second fundamental form and curvatures from the embedding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeSample {
    pub metric: MetricSample,
    pub l: f64,
    pub m: f64,
    pub n: f64,
    pub k: f64,
    pub h: f64,
    pub normal: Vector3<f64>,
}

impl ShapeSample {
    fn from_forms(metric: MetricSample, l: f64, m: f64, n: f64, normal: Vector3<f64>) -> Self {
        let MetricSample { e, f, g, detg } = metric;
        let k = (l * n - m * m) / detg;
        let h = (e * n - 2.0 * f * m + g * l) / (2.0 * detg);
        ShapeSample { metric, l, m, n, k, h, normal }
    }

    /// Recompute `K` and `H` from the stored forms; largest discrepancy.
    pub fn consistency(&self) -> f64 {
        let again = ShapeSample::from_forms(self.metric, self.l, self.m, self.n, self.normal);
        (again.k - self.k).abs().max((again.h - self.h).abs())
    }
}

fn check_gauge(b: &CurveJet, t: f64) -> Result<()> {
    let checks =
        [("|beta| - 1", b.pos.norm() - 1.0), ("|beta'| - 1", b.d1.norm() - 1.0), ("<beta, beta'>", b.pos.dot(&b.d1))];
    for (what, value) in checks {
        if value.abs() > NORMALIZATION_TOLERANCE || !value.is_finite() {
            return Err(Error::Normalization { t, what, value });
        }
    }
    Ok(())
}

fn lambda_from_jets(a: &CurveJet, b: &CurveJet, t: f64) -> Result<f64> {
    let bp2 = b.d1.norm_squared();
    if bp2.sqrt() < MIN_SPEED {
        return Err(Error::Normalization { t, what: "|beta'|", value: bp2.sqrt() });
    }
    for (what, value) in [("<alpha', beta'>", a.d1.dot(&b.d1)), ("<beta, beta'>", b.pos.dot(&b.d1))] {
        if value.abs() > NORMALIZATION_TOLERANCE || !value.is_finite() {
            return Err(Error::Normalization { t, what, value });
        }
    }
    Ok(a.d1.cross(&b.pos).dot(&b.d1) / bp2)
}

/// `λ = <α' ∧ β, β'> / |β'|²`, defined by `α' ∧ β = λ β'` in the striction gauge.
pub fn distribution_parameter(patch: &RuledPatch, t: f64) -> Result<f64> {
    let (a, b) = patch.jets(t)?;
    lambda_from_jets(&a, &b, t)
}

/// `h = <α', β'> / |β'|²`, so that `α - h β` is the line of striction.
pub fn striction_offset(alpha: &SpaceCurve, beta: &SpaceCurve, t: f64) -> Result<f64> {
    let (a, b) = (alpha.jet(t)?, beta.jet(t)?);
    let bp2 = b.d1.norm_squared();
    if bp2.sqrt() < MIN_SPEED {
        return Err(Error::Normalization { t, what: "|beta'|", value: bp2.sqrt() });
    }
    Ok(a.d1.dot(&b.d1) / bp2)
}

const FRENET_FD_STEP: f64 = 1e-3;

/// The same offset from `β`'s components in the Frenet frame of `α`:
/// `h = v (β1' - v κ β2) / |β'|²` with `β1 = <β, T>`, `β2 = <β, N>` and `v = |α'|`.
/// `β1'` is differentiated numerically (five-point stencil), so this route
/// shares no derivative algebra with [`striction_offset`].
pub fn striction_offset_frenet(alpha: &SpaceCurve, beta: &SpaceCurve, t: f64) -> Result<f64> {
    let (fr, frame) = frenet_regular(alpha, t)?;
    let b = beta.jet(t)?;
    let beta1 = |s: f64| -> Result<f64> {
        let tangent = frenet_from_jet(&alpha.jet_unchecked(s)?)?.tangent;
        Ok(beta.jet_unchecked(s)?.pos.dot(&tangent))
    };
    let h = FRENET_FD_STEP;
    let d_beta1 = (beta1(t - 2.0 * h)? - 8.0 * beta1(t - h)? + 8.0 * beta1(t + h)? - beta1(t + 2.0 * h)?) / (12.0 * h);
    let beta2 = b.pos.dot(&frame.normal);
    let v = fr.speed;
    Ok(v * (d_beta1 - v * fr.kappa * beta2) / b.d1.norm_squared())
}

const STRICTION_D3_STEP: f64 = 1e-4;

struct StrictionCurve {
    alpha: SpaceCurve,
    beta: SpaceCurve,
}

impl StrictionCurve {
    /// `(α, β, h, h', h'')` at `t`, all from exact jets.
    fn parts(&self, t: f64) -> Result<(CurveJet, CurveJet, [f64; 3])> {
        let a = self.alpha.jet_unchecked(t)?;
        let b = self.beta.jet_unchecked(t)?;
        let q = b.d1.norm_squared();
        if q.sqrt() < MIN_SPEED {
            return Err(Error::Normalization { t, what: "|beta'|", value: q.sqrt() });
        }
        let p = a.d1.dot(&b.d1);
        let p1 = a.d2.dot(&b.d1) + a.d1.dot(&b.d2);
        let p2 = a.d3.dot(&b.d1) + 2.0 * a.d2.dot(&b.d2) + a.d1.dot(&b.d3);
        let q1 = 2.0 * b.d1.dot(&b.d2);
        let q2 = 2.0 * (b.d2.norm_squared() + b.d1.dot(&b.d3));
        let h = p / q;
        let h1 = (p1 - h * q1) / q;
        let h2 = (p2 - 2.0 * h1 * q1 - h * q2) / q;
        Ok((a, b, [h, h1, h2]))
    }
}

impl CurveEval for StrictionCurve {
    fn jet(&self, t: f64) -> Result<CurveJet> {
        let (a, b, [h, h1, h2]) = self.parts(t)?;
        let s = STRICTION_D3_STEP;
        let h3 = (self.parts(t + s)?.2[2] - self.parts(t - s)?.2[2]) / (2.0 * s);
        Ok(CurveJet {
            pos: a.pos - b.pos * h,
            d1: a.d1 - b.pos * h1 - b.d1 * h,
            d2: a.d2 - b.pos * h2 - b.d1 * (2.0 * h1) - b.d2 * h,
            d3: a.d3 - b.pos * h3 - b.d1 * (3.0 * h2) - b.d2 * (3.0 * h1) - b.d3 * h,
        })
    }
}

/// `ᾱ = α - h β`. Position and first two derivatives are exact; the third
/// uses a central difference of `h''`.
pub fn striction_line(alpha: &SpaceCurve, beta: &SpaceCurve) -> Result<SpaceCurve> {
    let (da, db) = (alpha.domain(), beta.domain());
    let domain = Interval::new(da.lo.max(db.lo), da.hi.min(db.hi))?;
    let curve = StrictionCurve { alpha: alpha.clone(), beta: beta.clone() };
    curve.parts(domain.midpoint())?;
    Ok(SpaceCurve::new(format!("striction line of {}", alpha.label()), domain, curve))
}

/// `E = |X_t|²`, `F = <X_t, X_u>`, `G = |X_u|²`, with the gauge enforced.
pub fn first_fundamental_form(patch: &RuledPatch, t: f64, u: f64) -> Result<MetricSample> {
    let (a, b) = patch.jets(t)?;
    check_gauge(&b, t)?;
    let xt = a.d1 + b.d1 * u;
    Ok(MetricSample::new(xt.norm_squared(), xt.dot(&b.pos), b.pos.norm_squared()))
}

/// `K = -λ² / (λ² + u²)²`.
pub fn gauss_curvature_closed(patch: &RuledPatch, t: f64, u: f64) -> Result<f64> {
    let lambda = distribution_parameter(patch, t)?;
    gauss_curvature_from_lambda(lambda, t, u)
}

pub(crate) fn gauss_curvature_from_lambda(lambda: f64, t: f64, u: f64) -> Result<f64> {
    let l2 = lambda * lambda;
    if l2 == 0.0 {
        return Ok(0.0);
    }
    let e = l2 + u * u;
    if e == 0.0 {
        return Err(Error::Degenerate { t, u, what: "lambda^2 + u^2 vanishes" });
    }
    Ok(-l2 / (e * e))
}

/// Fundamental forms from `X_t, X_u, X_tt, X_tu` and `X_uu = 0`.
pub fn shape_operator_sample(patch: &RuledPatch, t: f64, u: f64) -> Result<ShapeSample> {
    let (a, b) = patch.jets(t)?;
    let xt = a.d1 + b.d1 * u;
    let xu = b.pos;
    let xtt = a.d2 + b.d2 * u;
    let xtu = b.d1;
    let cross = xt.cross(&xu);
    let norm = cross.norm();
    if norm < MIN_SPEED || !norm.is_finite() {
        return Err(Error::Degenerate { t, u, what: "X_t ^ X_u vanishes" });
    }
    let normal = cross / norm;
    let metric = MetricSample::new(xt.norm_squared(), xt.dot(&xu), xu.norm_squared());
    let n = Vector3::<f64>::zeros().dot(&normal);
    Ok(ShapeSample::from_forms(metric, xtt.dot(&normal), xtu.dot(&normal), n, normal))
}

/// `H = -σ κ / (2 sqrt(1 + τ0² u²))` with `σ = sign <β, B>`, for the unit
/// normal `X_t ∧ X_u / |X_t ∧ X_u|`. Where `α` has no osculating plane
/// (helicoid axis, inflection points) `κ = 0` and `H = 0`.
pub fn mean_curvature_closed(patch: &RuledPatch, t: f64, u: f64) -> Result<f64> {
    let tau0 = match patch.canonical {
        Canonical::None => {
            return Err(Error::NotCanonical { t, what: "no constant-torsion or helicoid structure".into() })
        }
        Canonical::Helicoid => None,
        Canonical::ConstantTorsion(tau0) => Some(tau0),
    };
    let fr = frenet(&patch.alpha, t)?;
    let beta = patch.beta.jet(t)?.pos;
    let Some(frame) = fr.frame else {
        let dot = beta.dot(&fr.tangent);
        if dot.abs() > BINORMAL_TOLERANCE {
            return Err(Error::NotCanonical {
                t,
                what: format!("ruling not orthogonal to the striction line: {dot:e}"),
            });
        }
        return Ok(0.0);
    };
    let Some(tau0) = tau0 else {
        return Err(Error::NotCanonical { t, what: format!("helicoid axis has curvature {:e}", fr.kappa) });
    };
    let dev = (beta - frame.binormal).norm().min((beta + frame.binormal).norm());
    if dev > BINORMAL_TOLERANCE {
        return Err(Error::NotCanonical { t, what: format!("ruling differs from the binormal by {dev:e}") });
    }
    let sigma = beta.dot(&frame.binormal).signum();
    Ok(-sigma * fr.kappa / (2.0 * (1.0 + tau0 * tau0 * u * u).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceClass {
    Developable,
    Ricci,
    NonRicci,
}

impl std::fmt::Display for SurfaceClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SurfaceClass::Developable => "developable",
            SurfaceClass::Ricci => "ricci",
            SurfaceClass::NonRicci => "non_ricci",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub class: SurfaceClass,
    pub probes: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// `max |λ² - |α'|²|`.
    pub speed_gap: f64,
    /// `max λ² - min λ²`.
    pub lambda_sq_spread: f64,
    /// Larger of the two above; what the tolerance is compared against.
    pub deviation: f64,
}

pub fn classify(patch: &RuledPatch, probes: usize) -> Result<Classification> {
    classify_with_tolerance(patch, probes, CLASSIFY_TOLERANCE)
}

/// Developable if `max |λ| ≤ 1e-9`; Ricci if `λ²` and `|α'|²` agree and are
/// constant within `tol`; otherwise not Ricci.
pub fn classify_with_tolerance(patch: &RuledPatch, probes: usize, tol: f64) -> Result<Classification> {
    if probes < 2 {
        return Err(Error::InvalidArgument(format!("classification needs at least 2 probes, got {probes}")));
    }
    let (mut lmin, mut lmax) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut l2min, mut l2max, mut gap) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
    for t in patch.t_range.linspace(probes) {
        let (a, b) = patch.jets(t)?;
        check_gauge(&b, t)?;
        let lambda = lambda_from_jets(&a, &b, t)?;
        let l2 = lambda * lambda;
        lmin = lmin.min(lambda);
        lmax = lmax.max(lambda);
        l2min = l2min.min(l2);
        l2max = l2max.max(l2);
        gap = gap.max((l2 - a.d1.norm_squared()).abs());
    }
    let spread = l2max - l2min;
    let deviation = gap.max(spread);
    let class = if lmin.abs().max(lmax.abs()) <= DEVELOPABLE_TOLERANCE {
        SurfaceClass::Developable
    } else if deviation <= tol {
        SurfaceClass::Ricci
    } else {
        SurfaceClass::NonRicci
    };
    Ok(Classification {
        class,
        probes,
        lambda_min: lmin,
        lambda_max: lmax,
        speed_gap: gap,
        lambda_sq_spread: spread,
        deviation,
    })
}

/// One row of the per-point surface table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfaceRecord {
    pub t: f64,
    pub u: f64,
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub l: f64,
    pub m: f64,
    pub n: f64,
    pub k_closed: f64,
    pub k_forms: f64,
    /// Only for canonical patches.
    pub h_closed: Option<f64>,
    pub h_forms: f64,
    pub lambda: f64,
}

pub fn surface_record(patch: &RuledPatch, t: f64, u: f64) -> Result<SurfaceRecord> {
    let shape = shape_operator_sample(patch, t, u)?;
    let lambda = distribution_parameter(patch, t)?;
    let h_closed = match patch.canonical {
        Canonical::None => None,
        _ => Some(mean_curvature_closed(patch, t, u)?),
    };
    Ok(SurfaceRecord {
        t,
        u,
        e: shape.metric.e,
        f: shape.metric.f,
        g: shape.metric.g,
        l: shape.l,
        m: shape.m,
        n: shape.n,
        k_closed: gauss_curvature_from_lambda(lambda, t, u)?,
        k_forms: shape.k,
        h_closed,
        h_forms: shape.h,
        lambda,
    })
}

/// Records on an `nt × nu` grid covering the patch rectangle, `t`-major.
pub fn surface_records(patch: &RuledPatch, nt: usize, nu: usize) -> Result<Vec<SurfaceRecord>> {
    let ts = patch.t_range.linspace(nt);
    let us = patch.u_range.linspace(nu);
    ts.par_iter()
        .flat_map_iter(|&t| us.iter().map(move |&u| (t, u)))
        .map(|(t, u)| surface_record(patch, t, u))
        .collect()
}

/// Magnitude below which [`relative_close`] compares absolutely.
pub const RELATIVE_FLOOR: f64 = 1e-8;

/// `|a - b| ≤ tol · max(|a|, |b|, RELATIVE_FLOOR)`.
pub fn relative_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(RELATIVE_FLOOR)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::CurveDefinition;

    fn expr_curve(x: &str, y: &str, z: &str, lo: f64, hi: f64) -> SpaceCurve {
        CurveDefinition {
            name: None,
            variable: None,
            x: x.into(),
            y: y.into(),
            z: z.into(),
            domain: [lo, hi],
            parameters: Default::default(),
        }
        .to_curve()
        .unwrap()
    }

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    fn helicoid() -> RuledPatch {
        RuledPatch::new(
            expr_curve("0", "0", "t", -3.0, 3.0),
            expr_curve("cos(t)", "sin(t)", "0", -3.0, 3.0),
            iv(-3.0, 3.0),
            iv(-2.0, 2.0),
        )
        .unwrap()
        .with_canonical(Canonical::Helicoid)
    }

    fn conoid(w: &str) -> RuledPatch {
        RuledPatch::new(
            expr_curve("0", "0", w, 0.5, 1.5),
            expr_curve("cos(t)", "sin(t)", "0", 0.5, 1.5),
            iv(0.5, 1.5),
            iv(-1.0, 1.0),
        )
        .unwrap()
    }

    #[test]
    fn helicoid_metric_and_lambda() {
        let p = helicoid();
        let m = first_fundamental_form(&p, 0.0, 2.0).unwrap();
        assert!((m.e - 5.0).abs() < 1e-15 && m.f.abs() < 1e-15 && (m.g - 1.0).abs() < 1e-15);
        assert!((distribution_parameter(&p, 0.7).unwrap() - 1.0).abs() < 1e-15);
        assert!((gauss_curvature_closed(&p, 0.3, 0.0).unwrap() + 1.0).abs() < 1e-15);
        for u in [-1.0, 0.0, 1.5] {
            let s = shape_operator_sample(&p, 0.4, u).unwrap();
            assert!(s.h.abs() < 1e-12);
            assert_eq!(s.n, 0.0);
            assert!(s.consistency() <= 1e-12);
            assert!((s.k - gauss_curvature_closed(&p, 0.4, u).unwrap()).abs() < 1e-12);
        }
        assert_eq!(mean_curvature_closed(&p, 0.2, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn gauss_curvature_decays_monotonically() {
        let p = helicoid();
        let mut last = -2.0;
        for i in 0..20 {
            let k = gauss_curvature_closed(&p, 0.0, i as f64 * 0.5).unwrap();
            assert!(k < 0.0 && k > last);
            last = k;
        }
    }

    #[test]
    fn determinant_matches_lambda() {
        let p = conoid("t^2");
        for t in [0.6, 1.0, 1.4] {
            let lambda = distribution_parameter(&p, t).unwrap();
            assert!((lambda.abs() - 2.0 * t).abs() < 1e-14);
            for u in [-1.0, 0.25, 1.0] {
                let m = first_fundamental_form(&p, t, u).unwrap();
                assert!((m.detg - (lambda * lambda + u * u)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn conoid_classification() {
        assert_eq!(classify(&conoid("t^2"), 20).unwrap().class, SurfaceClass::NonRicci);
        assert_eq!(classify(&conoid("3*t + 1"), 20).unwrap().class, SurfaceClass::Ricci);
        assert_eq!(classify(&conoid("0"), 20).unwrap().class, SurfaceClass::Developable);
        assert!(matches!(mean_curvature_closed(&conoid("t^2"), 1.0, 0.0), Err(Error::NotCanonical { .. })));
    }

    #[test]
    fn gauge_violations_are_reported() {
        let p = RuledPatch::new(
            expr_curve("0", "0", "t", 0.0, 1.0),
            expr_curve("2*cos(t)", "2*sin(t)", "0", 0.0, 1.0),
            iv(0.0, 1.0),
            iv(-1.0, 1.0),
        )
        .unwrap();
        assert!(matches!(first_fundamental_form(&p, 0.5, 0.0), Err(Error::Normalization { what: "|beta| - 1", .. })));
        let q = RuledPatch::new(
            expr_curve("t", "0", "0", 0.0, 1.0),
            expr_curve("cos(t)", "sin(t)", "0", 0.0, 1.0),
            iv(0.0, 1.0),
            iv(-1.0, 1.0),
        )
        .unwrap();
        assert!(matches!(distribution_parameter(&q, 0.5), Err(Error::Normalization { what: "<alpha', beta'>", .. })));
    }

    #[test]
    fn offset_helicoid_striction() {
        let alpha = expr_curve("cos(t)", "sin(t)", "t", -2.0, 2.0);
        let beta = expr_curve("cos(t)", "sin(t)", "0", -2.0, 2.0);
        let bar = striction_line(&alpha, &beta).unwrap();
        for t in [-1.5, 0.0, 0.8] {
            assert!((striction_offset(&alpha, &beta, t).unwrap() - 1.0).abs() < 1e-14);
            assert!((striction_offset_frenet(&alpha, &beta, t).unwrap() - 1.0).abs() < 1e-9);
            let j = bar.jet(t).unwrap();
            assert!((j.pos - Vector3::new(0.0, 0.0, t)).norm() < 1e-9);
            assert!((j.d1 - Vector3::z()).norm() < 1e-9);
            assert!(j.d2.norm() < 1e-9 && j.d3.norm() < 1e-6);
        }
    }

    #[test]
    fn striction_line_is_orthogonal_to_ruling_motion() {
        let alpha = expr_curve("t", "t^2/3", "sin(t)", -1.0, 1.0);
        let beta = expr_curve("cos(t)*cos(t/2)", "sin(t)*cos(t/2)", "sin(t/2)", -1.0, 1.0);
        let bar = striction_line(&alpha, &beta).unwrap();
        for t in [-0.7, 0.1, 0.9] {
            let j = bar.jet(t).unwrap();
            assert!(j.d1.dot(&beta.jet(t).unwrap().d1).abs() < 1e-8);
            let h = 1e-4;
            let fd = (bar.jet(t + h).unwrap().d2 - bar.jet(t - h).unwrap().d2) / (2.0 * h);
            assert!((fd - j.d3).norm() < 1e-5);
            let (hg, hf) =
                (striction_offset(&alpha, &beta, t).unwrap(), striction_offset_frenet(&alpha, &beta, t).unwrap());
            assert!((hg - hf).abs() < 1e-8, "{hg} vs {hf}");
        }
    }

    #[test]
    fn tangent_developable_is_developable() {
        let c = 0.5f64.sqrt();
        let alpha = expr_curve(&format!("0.5*cos(t/{c})"), &format!("0.5*sin(t/{c})"), &format!("0.5*t/{c}"), 0.0, 4.0);
        let beta =
            expr_curve(&format!("-0.5/{c}*sin(t/{c})"), &format!("0.5/{c}*cos(t/{c})"), &format!("0.5/{c}"), 0.0, 4.0);
        let p = RuledPatch::new(alpha, beta, iv(0.0, 4.0), iv(0.2, 1.0)).unwrap();
        let c = classify(&p, 30).unwrap();
        assert_eq!(c.class, SurfaceClass::Developable);
        for r in surface_records(&p, 5, 5).unwrap() {
            assert!(r.k_closed.abs() <= 1e-9 && r.k_forms.abs() <= 1e-9);
        }
    }

    #[test]
    fn records_are_t_major() {
        let r = surface_records(&helicoid(), 3, 2).unwrap();
        assert_eq!(r.len(), 6);
        assert_eq!((r[0].t, r[0].u), (-3.0, -2.0));
        assert_eq!((r[1].t, r[1].u), (-3.0, 2.0));
        assert_eq!(r[2].t, 0.0);
        assert!(r.iter().all(|x| x.h_closed == Some(0.0)));
    }
}
