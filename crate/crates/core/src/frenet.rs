//! Speed, arc length, arc-length reparametrization and the Frenet apparatus.
//!
//! Torsion follows the convention `B' = τ N` (so `N' = -κ T - τ B`), which is
//! the negative of the usual triple-product formula. [`TORSION_SIGN`] is the
//! single place where that choice lives.

use nalgebra::Vector3;

use crate::curve::{CurveEval, Interval, SpaceCurve};
use crate::error::{Error, Result};
use crate::jet::CurveJet;
use crate::quadrature::{adaptive_simpson, DEFAULT_TOLERANCE, MAX_DEPTH};

/// `τ = TORSION_SIGN · <α' ∧ α'', α'''> / |α' ∧ α''|²`, chosen so that `dB/ds = τ N`.
pub const TORSION_SIGN: f64 = -1.0;

/// Points with `κ < KAPPA_MIN_FACTOR / |α'|` are reported as non-regular.
pub const KAPPA_MIN_FACTOR: f64 = 1e-10;

/// Speeds below this are treated as a vanishing tangent.
pub const MIN_SPEED: f64 = 1e-10;

pub fn speed(curve: &SpaceCurve, t: f64) -> Result<f64> {
    Ok(curve.jet(t)?.d1.norm())
}

/// `∫_{t0}^{t1} |α'|` by adaptive Simpson at absolute tolerance 1e-10.
pub fn arc_length(curve: &SpaceCurve, t0: f64, t1: f64) -> Result<f64> {
    arc_length_with_tolerance(curve, t0, t1, DEFAULT_TOLERANCE)
}

pub fn arc_length_with_tolerance(curve: &SpaceCurve, t0: f64, t1: f64, tol: f64) -> Result<f64> {
    for t in [t0, t1] {
        curve.jet(t)?;
    }
    adaptive_simpson(|t| Ok(curve.jet_unchecked(t)?.d1.norm()), t0, t1, tol, MAX_DEPTH)
}

/// Frenet frame part that only exists where the curvature is non-zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OsculatingFrame {
    pub normal: Vector3<f64>,
    pub binormal: Vector3<f64>,
    pub tau: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrenetData {
    pub tangent: Vector3<f64>,
    pub kappa: f64,
    pub speed: f64,
    /// `None` where the curvature is below threshold.
    pub frame: Option<OsculatingFrame>,
}

impl FrenetData {
    pub fn is_regular(&self) -> bool {
        self.frame.is_some()
    }

    pub fn normal(&self) -> Option<Vector3<f64>> {
        self.frame.map(|f| f.normal)
    }

    pub fn binormal(&self) -> Option<Vector3<f64>> {
        self.frame.map(|f| f.binormal)
    }

    pub fn tau(&self) -> Option<f64> {
        self.frame.map(|f| f.tau)
    }
}

/// Frenet data from a curve jet at one point.
pub fn frenet_from_jet(jet: &CurveJet) -> Result<FrenetData> {
    let v = jet.d1.norm();
    if v < MIN_SPEED {
        return Err(Error::VanishingSpeed { t: f64::NAN, speed: v });
    }
    let tangent = jet.d1 / v;
    let c = jet.d1.cross(&jet.d2);
    let cn = c.norm();
    let kappa = cn / (v * v * v);
    if kappa < KAPPA_MIN_FACTOR / v {
        return Ok(FrenetData { tangent, kappa, speed: v, frame: None });
    }
    let binormal = c / cn;
    let normal = binormal.cross(&tangent);
    let tau = TORSION_SIGN * c.dot(&jet.d3) / (cn * cn);
    Ok(FrenetData { tangent, kappa, speed: v, frame: Some(OsculatingFrame { normal, binormal, tau }) })
}

pub fn frenet(curve: &SpaceCurve, t: f64) -> Result<FrenetData> {
    frenet_from_jet(&curve.jet(t)?).map_err(|e| match e {
        Error::VanishingSpeed { speed, .. } => Error::VanishingSpeed { t, speed },
        other => other,
    })
}

/// Frenet data that must be regular.
pub fn frenet_regular(curve: &SpaceCurve, t: f64) -> Result<(FrenetData, OsculatingFrame)> {
    let f = frenet(curve, t)?;
    match f.frame {
        Some(frame) => Ok((f, frame)),
        None => Err(Error::NonRegular { t, kappa: f.kappa }),
    }
}

const TABLE_SEGMENTS: usize = 256;
const NEWTON_STEP_TOL: f64 = 1e-12;
const SEGMENT_TOL: f64 = 1e-14;

/// Unit-speed reparametrization of a regular curve, `s ↦ α(t(s))`.
///
/// The cumulative arc length is tabulated once at construction; `t(s)` is
/// found by Newton iteration inside the bracketing table segment, with
/// bisection as fallback. Derivatives follow from the chain rule, so the
/// result is exactly unit speed up to rounding.
pub struct ArcLengthCurve {
    base: SpaceCurve,
    nodes: Vec<f64>,
    cumulative: Vec<f64>,
}

impl ArcLengthCurve {
    pub fn new(base: SpaceCurve) -> Result<Self> {
        let nodes = base.domain().linspace(TABLE_SEGMENTS + 1);
        for w in nodes.windows(2) {
            for t in [w[0], 0.5 * (w[0] + w[1])] {
                let v = speed(&base, t)?;
                if v < MIN_SPEED {
                    return Err(Error::VanishingSpeed { t, speed: v });
                }
            }
        }
        let last = *nodes.last().unwrap();
        let v = speed(&base, last)?;
        if v < MIN_SPEED {
            return Err(Error::VanishingSpeed { t: last, speed: v });
        }
        let mut cumulative = Vec::with_capacity(nodes.len());
        cumulative.push(0.0);
        for w in nodes.windows(2) {
            let seg = Self::segment(&base, w[0], w[1])?;
            cumulative.push(cumulative.last().unwrap() + seg);
        }
        Ok(Self { base, nodes, cumulative })
    }

    fn segment(base: &SpaceCurve, a: f64, b: f64) -> Result<f64> {
        adaptive_simpson(|t| Ok(base.jet_unchecked(t)?.d1.norm()), a, b, SEGMENT_TOL, MAX_DEPTH)
    }

    pub fn total_length(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    /// Original parameter at arc length `s` from the domain start.
    pub fn parameter_at(&self, s: f64) -> Result<f64> {
        let total = self.total_length();
        if !(s >= -1e-12 * (1.0 + total) && s <= total * (1.0 + 1e-12) + 1e-12) {
            return Err(Error::OutOfDomain { t: s, lo: 0.0, hi: total });
        }
        let s = s.clamp(0.0, total);
        let i = match self.cumulative.partition_point(|&c| c <= s) {
            0 => 0,
            k => (k - 1).min(self.nodes.len() - 2),
        };
        let (mut lo, mut hi) = (self.nodes[i], self.nodes[i + 1]);
        let (s_lo, s_hi) = (self.cumulative[i], self.cumulative[i + 1]);
        let target = s - s_lo;
        let mut t = lo + (hi - lo) * target / (s_hi - s_lo);
        for _ in 0..100 {
            let f = Self::segment(&self.base, self.nodes[i], t)? - target;
            if f > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let v = self.base.jet_unchecked(t)?.d1.norm();
            let mut next = t - f / v;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let step = (next - t).abs();
            t = next;
            if step <= NEWTON_STEP_TOL * (1.0 + t.abs()) || hi - lo <= NEWTON_STEP_TOL {
                break;
            }
        }
        Ok(t)
    }
}

impl CurveEval for ArcLengthCurve {
    fn jet(&self, s: f64) -> Result<CurveJet> {
        let t = self.parameter_at(s)?;
        let j = self.base.jet_unchecked(t)?;
        let v = j.d1.norm();
        let v1 = j.d1.dot(&j.d2) / v;
        let v2 = (j.d2.norm_squared() + j.d1.dot(&j.d3) - v1 * v1) / v;
        let t1 = 1.0 / v;
        let t2 = -v1 / (v * v * v);
        let t3 = (3.0 * v1 * v1 - v * v2) / v.powi(5);
        Ok(CurveJet {
            pos: j.pos,
            d1: j.d1 * t1,
            d2: j.d2 * (t1 * t1) + j.d1 * t2,
            d3: j.d3 * (t1 * t1 * t1) + j.d2 * (3.0 * t1 * t2) + j.d1 * t3,
        })
    }
}

pub fn reparametrize_arclength(curve: &SpaceCurve) -> Result<SpaceCurve> {
    let table = ArcLengthCurve::new(curve.clone())?;
    let domain = Interval::new(0.0, table.total_length())?;
    Ok(SpaceCurve::new(format!("{} (arc length)", curve.label()), domain, table))
}
