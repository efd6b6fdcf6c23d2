//! Curves of prescribed constant torsion built from a unit-speed spherical
//! curve `B` via `α(t) = (1/τ0) ∫_{t0}^{t} B'(σ) ∧ B(σ) dσ`.

use nalgebra::Vector3;
use serde::Serialize;

use crate::curve::{CurveEval, SpaceCurve};
use crate::error::{Error, Result};
use crate::frenet::frenet_regular;
use crate::jet::CurveJet;

pub const MIN_PROBES: usize = 200;
pub const SPHERE_TOLERANCE: f64 = 1e-8;
pub const REGULARITY_MIN: f64 = 1e-8;
pub const DEFAULT_QUADRATURE_TOLERANCE: f64 = 1e-12;

/// Statistics on `|B| = 1`, `|B'| = 1` and `<B ∧ B', B''> ≠ 0` over a probe grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphericalCurveCheck {
    pub probes: usize,
    pub max_norm_deviation: f64,
    pub max_speed_deviation: f64,
    /// `min |<B ∧ B', B''>|` over the probes.
    pub min_regularity: f64,
    pub max_regularity: f64,
    /// `<B ∧ B', B''>` changes sign somewhere on the grid.
    pub regularity_sign_change: bool,
    pub on_sphere: bool,
    pub unit_speed: bool,
    pub regular: bool,
}

impl SphericalCurveCheck {
    pub fn passed(&self) -> bool {
        self.on_sphere && self.unit_speed && self.regular
    }

    /// Regularity vanishes everywhere: `B` runs along a great circle.
    pub fn is_great_circle(&self) -> bool {
        self.on_sphere && self.unit_speed && self.max_regularity < REGULARITY_MIN
    }

    fn failure(&self) -> String {
        let mut why = Vec::new();
        if !self.on_sphere {
            why.push(format!("max ||B|-1| = {:e}", self.max_norm_deviation));
        }
        if !self.unit_speed {
            why.push(format!("max ||B'|-1| = {:e}", self.max_speed_deviation));
        }
        if !self.regular {
            if self.regularity_sign_change {
                why.push("<B ^ B', B''> changes sign".to_string());
            } else {
                why.push(format!("min |<B ^ B', B''>| = {:e}", self.min_regularity));
            }
        }
        why.join("; ")
    }
}

/// Probe `B` on `max(grid, 200)` equally spaced points of its domain.
pub fn validate_spherical(b: &SpaceCurve, grid: usize) -> Result<SphericalCurveCheck> {
    if grid < 2 {
        return Err(Error::InvalidArgument(format!("probe grid must have at least 2 points, got {grid}")));
    }
    let probes = grid.max(MIN_PROBES);
    let mut check = SphericalCurveCheck {
        probes,
        max_norm_deviation: 0.0,
        max_speed_deviation: 0.0,
        min_regularity: f64::INFINITY,
        max_regularity: 0.0,
        regularity_sign_change: false,
        on_sphere: false,
        unit_speed: false,
        regular: false,
    };
    let mut sign = 0.0f64;
    for t in b.domain().linspace(probes) {
        let j = b.jet(t)?;
        let r = j.pos.cross(&j.d1).dot(&j.d2);
        check.max_norm_deviation = check.max_norm_deviation.max((j.pos.norm() - 1.0).abs());
        check.max_speed_deviation = check.max_speed_deviation.max((j.d1.norm() - 1.0).abs());
        check.min_regularity = check.min_regularity.min(r.abs());
        check.max_regularity = check.max_regularity.max(r.abs());
        if r != 0.0 {
            if sign != 0.0 && sign != r.signum() {
                check.regularity_sign_change = true;
            }
            sign = r.signum();
        }
    }
    check.on_sphere = check.max_norm_deviation <= SPHERE_TOLERANCE;
    check.unit_speed = check.max_speed_deviation <= SPHERE_TOLERANCE;
    check.regular = check.min_regularity >= REGULARITY_MIN && !check.regularity_sign_change;
    Ok(check)
}

/// Integrand `g = B' ∧ B` and its first two derivatives.
fn integrand(b: &SpaceCurve, t: f64) -> Result<[Vector3<f64>; 3]> {
    let j = b.jet_unchecked(t)?;
    Ok([j.d1.cross(&j.pos), j.d2.cross(&j.pos), j.d3.cross(&j.pos) + j.d2.cross(&j.d1)])
}

/// `∫_a^{a+x} p` for the quintic Hermite interpolant `p` of `g, g', g''` at both
/// ends of `[a, a+h]`, with `s = x/h`.
fn hermite_partial(h: f64, s: f64, ga: &[Vector3<f64>; 3], gb: &[Vector3<f64>; 3]) -> Vector3<f64> {
    let s2 = s * s;
    let s3 = s2 * s;
    let s4 = s3 * s;
    let s5 = s4 * s;
    let s6 = s5 * s;
    let i0 = s - 2.5 * s4 + 3.0 * s5 - s6;
    let i1 = 0.5 * s2 - 1.5 * s4 + 1.6 * s5 - 0.5 * s6;
    let i2 = 0.5 * (s3 / 3.0 - 0.75 * s4 + 0.6 * s5 - s6 / 6.0);
    let i3 = 0.5 * (0.25 * s4 - 0.4 * s5 + s6 / 6.0);
    let i4 = -s4 + 1.4 * s5 - 0.5 * s6;
    let i5 = 2.5 * s4 - 3.0 * s5 + s6;
    (ga[0] * i0 + ga[1] * (h * i1) + ga[2] * (h * h * i2) + gb[2] * (h * h * i3) + gb[1] * (h * i4) + gb[0] * i5) * h
}

#[derive(Debug, Clone)]
struct Node {
    t: f64,
    /// `∫_{t0}^{t} B' ∧ B`.
    integral: Vector3<f64>,
    g: [Vector3<f64>; 3],
}

const INITIAL_SEGMENTS: usize = 32;
const MAX_REFINEMENT: u32 = 40;

/// A curve of constant torsion `τ0` tabulated from its binormal indicatrix.
///
/// Node values come from an adaptive quintic-Hermite rule on the exact
/// integrand; between nodes the same interpolant is integrated in closed form,
/// so the table is consistent at nodes. Derivatives bypass the table:
/// `α' = (B' ∧ B)/τ0` and its derivatives come straight from `B`'s jets.
#[derive(Debug, Clone)]
pub struct ConstructedCurve {
    binormal: SpaceCurve,
    tau0: f64,
    t0: f64,
    tolerance: f64,
    nodes: Vec<Node>,
    offset: Vector3<f64>,
}

impl ConstructedCurve {
    pub fn tau0(&self) -> f64 {
        self.tau0
    }

    pub fn base_point(&self) -> f64 {
        self.t0
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn binormal(&self) -> &SpaceCurve {
        &self.binormal
    }

    /// Translate so that `α(t0) = p` (the integral pins `α(t0) = 0`).
    pub fn with_base_position(mut self, p: Vector3<f64>) -> Self {
        self.offset = p;
        self
    }

    pub fn to_curve(&self) -> SpaceCurve {
        SpaceCurve::new(
            format!("constant-torsion curve of {}", self.binormal.label()),
            self.binormal.domain(),
            self.clone(),
        )
    }

    fn position(&self, t: f64) -> Result<Vector3<f64>> {
        let k = self.nodes.partition_point(|n| n.t <= t);
        let i = k.saturating_sub(1).min(self.nodes.len() - 2);
        let (a, b) = (&self.nodes[i], &self.nodes[i + 1]);
        let h = b.t - a.t;
        let partial = if t == a.t { Vector3::zeros() } else { hermite_partial(h, (t - a.t) / h, &a.g, &b.g) };
        Ok((a.integral + partial) / self.tau0 + self.offset)
    }
}

impl CurveEval for ConstructedCurve {
    fn jet(&self, t: f64) -> Result<CurveJet> {
        let [g0, g1, g2] = integrand(&self.binormal, t)?;
        let k = 1.0 / self.tau0;
        Ok(CurveJet { pos: self.position(t)?, d1: g0 * k, d2: g1 * k, d3: g2 * k })
    }
}

/// `(t, g(t), ∫ over the segment ending at t)`.
type Segment = (f64, [Vector3<f64>; 3], Vector3<f64>);

fn hermite_rule(h: f64, ga: &[Vector3<f64>; 3], gb: &[Vector3<f64>; 3]) -> Vector3<f64> {
    (ga[0] + gb[0]) * (0.5 * h) + (ga[1] - gb[1]) * (h * h / 10.0) + (ga[2] + gb[2]) * (h * h * h / 120.0)
}

#[allow(clippy::too_many_arguments)]
fn refine(
    b: &SpaceCurve,
    a: f64,
    ga: [Vector3<f64>; 3],
    c: f64,
    gc: [Vector3<f64>; 3],
    tol_per_length: f64,
    depth: u32,
    out: &mut Vec<Segment>,
) -> Result<()> {
    let m = 0.5 * (a + c);
    let gm = integrand(b, m)?;
    let whole = hermite_rule(c - a, &ga, &gc);
    let left = hermite_rule(m - a, &ga, &gm);
    let right = hermite_rule(c - m, &gm, &gc);
    let err = (left + right - whole).norm();
    if depth == 0 || err <= tol_per_length * (c - a) {
        out.push((m, gm, left));
        out.push((c, gc, right));
        return Ok(());
    }
    refine(b, a, ga, m, gm, tol_per_length, depth - 1, out)?;
    refine(b, m, gm, c, gc, tol_per_length, depth - 1, out)
}

/// Integrate `(1/τ0) B' ∧ B` from `t0` (domain midpoint if `None`).
pub fn integrate_alpha(b: &SpaceCurve, tau0: f64, t0: Option<f64>, tol: f64) -> Result<ConstructedCurve> {
    if tau0 == 0.0 || !tau0.is_finite() {
        return Err(Error::InvalidArgument(format!("torsion must be a non-zero finite number, got {tau0}")));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("quadrature tolerance must be positive, got {tol}")));
    }
    let check = validate_spherical(b, MIN_PROBES)?;
    if check.is_great_circle() {
        return Err(Error::GreatCircle);
    }
    if !check.passed() {
        return Err(Error::NotSpherical(check.failure()));
    }
    let domain = b.domain();
    let t0 = t0.unwrap_or_else(|| domain.midpoint());
    if !domain.contains(t0) {
        return Err(Error::OutOfDomain { t: t0, lo: domain.lo, hi: domain.hi });
    }
    let tol_per_length = tol / domain.width();

    let mut breaks = domain.linspace(INITIAL_SEGMENTS + 1);
    breaks.push(t0);
    breaks.sort_by(|x, y| x.total_cmp(y));
    breaks.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * (1.0 + y.abs()));

    let mut seq: Vec<Segment> = Vec::new();
    let mut ga = integrand(b, breaks[0])?;
    seq.push((breaks[0], ga, Vector3::zeros()));
    for w in breaks.windows(2) {
        if w[1] - w[0] <= 0.0 {
            continue;
        }
        let gc = integrand(b, w[1])?;
        refine(b, w[0], ga, w[1], gc, tol_per_length, MAX_REFINEMENT, &mut seq)?;
        ga = gc;
    }

    let mut nodes = Vec::with_capacity(seq.len());
    let mut acc = Vector3::zeros();
    for (t, g, seg) in seq {
        acc += seg;
        nodes.push(Node { t, integral: acc, g });
    }
    let k0 = nodes
        .iter()
        .enumerate()
        .min_by(|x, y| (x.1.t - t0).abs().total_cmp(&(y.1.t - t0).abs()))
        .map(|(i, _)| i)
        .unwrap();
    let base = nodes[k0].integral;
    for n in &mut nodes {
        n.integral -= base;
    }
    Ok(ConstructedCurve { binormal: b.clone(), tau0, t0, tolerance: tol, nodes, offset: Vector3::zeros() })
}

/// `max_t min(|B_frenet(α) - B|, |B_frenet(α) + B|)` over `grid` probes.
pub fn verify_binormal(alpha: &SpaceCurve, b: &SpaceCurve, grid: usize) -> Result<f64> {
    if grid < 2 {
        return Err(Error::InvalidArgument(format!("probe grid must have at least 2 points, got {grid}")));
    }
    let mut worst = 0.0f64;
    for t in alpha.domain().linspace(grid) {
        let (_, frame) = frenet_regular(alpha, t)?;
        let target = b.jet(t)?.pos;
        let d = (frame.binormal - target).norm().min((frame.binormal + target).norm());
        worst = worst.max(d);
    }
    Ok(worst)
}
