//! Parametric space curves with order-3 jet evaluation.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{Expression, DEFAULT_VARIABLE};
use crate::jet::CurveJet;

/// Closed parameter interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidArgument(format!("interval [{lo}, {hi}] must be finite with lo < hi")));
        }
        Ok(Self { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, t: f64) -> bool {
        let slack = 1e-12 * (1.0 + self.lo.abs().max(self.hi.abs()));
        t >= self.lo - slack && t <= self.hi + slack
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.contains(other.lo) && self.contains(other.hi)
    }

    /// `n` equally spaced points including both endpoints.
    pub fn linspace(&self, n: usize) -> Vec<f64> {
        match n {
            0 => Vec::new(),
            1 => vec![self.midpoint()],
            _ => (0..n).map(|i| self.lo + self.width() * i as f64 / (n - 1) as f64).collect(),
        }
    }

    /// Shrink symmetrically by `fraction` of the width on each side.
    pub fn inset(&self, fraction: f64) -> Interval {
        let d = fraction * self.width();
        Interval { lo: self.lo + d, hi: self.hi - d }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Anything that can produce position and three derivatives at a parameter.
pub trait CurveEval: Send + Sync {
    fn jet(&self, t: f64) -> Result<CurveJet>;
}

impl<F> CurveEval for F
where
    F: Fn(f64) -> Result<CurveJet> + Send + Sync,
{
    fn jet(&self, t: f64) -> Result<CurveJet> {
        self(t)
    }
}

/// A curve in R^3 on a parameter interval. Cheap to clone.
#[derive(Clone)]
pub struct SpaceCurve {
    eval: Arc<dyn CurveEval>,
    domain: Interval,
    label: String,
}

impl fmt::Debug for SpaceCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpaceCurve").field("label", &self.label).field("domain", &self.domain).finish()
    }
}

impl SpaceCurve {
    pub fn new(label: impl Into<String>, domain: Interval, eval: impl CurveEval + 'static) -> Self {
        Self { eval: Arc::new(eval), domain, label: label.into() }
    }

    pub fn from_arc(label: impl Into<String>, domain: Interval, eval: Arc<dyn CurveEval>) -> Self {
        Self { eval, domain, label: label.into() }
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Same curve on a sub-interval of its domain.
    pub fn restrict(&self, domain: Interval) -> Result<SpaceCurve> {
        if !self.domain.contains_interval(&domain) {
            return Err(Error::InvalidArgument(format!(
                "restriction {domain} is not inside the curve domain {}",
                self.domain
            )));
        }
        Ok(Self { domain, ..self.clone() })
    }

    /// Jet at `t`; `t` must lie in the domain.
    pub fn jet(&self, t: f64) -> Result<CurveJet> {
        if !self.domain.contains(t) {
            return Err(Error::OutOfDomain { t, lo: self.domain.lo, hi: self.domain.hi });
        }
        self.jet_unchecked(t)
    }

    /// Jet without the domain check, for stencils that straddle an endpoint.
    pub fn jet_unchecked(&self, t: f64) -> Result<CurveJet> {
        let j = self.eval.jet(t)?;
        if !j.is_finite() {
            return Err(Error::NonFinite(format!("curve `{}` at t = {t}", self.label)));
        }
        Ok(j)
    }

    pub fn position(&self, t: f64) -> Result<Vector3<f64>> {
        Ok(self.jet(t)?.pos)
    }

    /// Pointwise sum with a translation.
    pub fn translated(&self, offset: Vector3<f64>) -> SpaceCurve {
        let inner = self.clone();
        SpaceCurve::new(self.label.clone(), self.domain, move |t| Ok(inner.jet_unchecked(t)?.translate(offset)))
    }
}

/// Curve whose components are parsed expressions.
#[derive(Debug, Clone)]
pub struct ExprCurve {
    components: [Expression; 3],
    bound: [Vec<f64>; 3],
}

impl ExprCurve {
    pub fn new(components: [Expression; 3], bindings: &BTreeMap<String, f64>) -> Result<Self> {
        let bound = [components[0].bind(bindings)?, components[1].bind(bindings)?, components[2].bind(bindings)?];
        Ok(Self { components, bound })
    }

    pub fn components(&self) -> &[Expression; 3] {
        &self.components
    }
}

impl CurveEval for ExprCurve {
    fn jet(&self, t: f64) -> Result<CurveJet> {
        let x = self.components[0].eval_resolved(t, &self.bound[0])?;
        let y = self.components[1].eval_resolved(t, &self.bound[1])?;
        let z = self.components[2].eval_resolved(t, &self.bound[2])?;
        Ok(CurveJet::from_components(x, y, z))
    }
}

/// Curve-definition file: three component expressions, parameters and a domain.
///
/// ```toml
/// name = "borderline"
/// x = "tanh(t)*cos(t)"
/// y = "tanh(t)*sin(t)"
/// z = "sech(t)"
/// domain = [-4.0, 4.0]
///
/// [parameters]
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveDefinition {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variable: Option<String>,
    pub x: String,
    pub y: String,
    pub z: String,
    pub domain: [f64; 2],
    #[serde(default)]
    pub parameters: BTreeMap<String, f64>,
}

impl CurveDefinition {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidArgument(format!("curve definition: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("curve definition serializes")
    }

    pub fn parse_components(&self) -> Result<[Expression; 3]> {
        let var = self.variable.as_deref().unwrap_or(DEFAULT_VARIABLE);
        let decl: Vec<(String, Option<f64>)> = self.parameters.iter().map(|(k, v)| (k.clone(), Some(*v))).collect();
        Ok([
            Expression::parse_with(&self.x, var, &decl)?,
            Expression::parse_with(&self.y, var, &decl)?,
            Expression::parse_with(&self.z, var, &decl)?,
        ])
    }

    /// Parse and wire into a [`SpaceCurve`].
    pub fn to_curve(&self) -> Result<SpaceCurve> {
        let domain = Interval::new(self.domain[0], self.domain[1])?;
        let curve = ExprCurve::new(self.parse_components()?, &BTreeMap::new())?;
        Ok(SpaceCurve::new(self.name.clone().unwrap_or_else(|| "curve".into()), domain, curve))
    }
}
