//! Closed-form examples and negative controls.
//!
//! Curves here carry hand-written jets and do not go through the expression
//! parser; each entry also exports expression-string definitions so the two
//! implementations can be compared.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use nalgebra::Vector3;

use crate::curve::{CurveDefinition, Interval, SpaceCurve};
use crate::error::{Error, Result};
use crate::expr::Expression;
use crate::jet::{CurveJet, Jet3};
use crate::ruled::{Canonical, RuledPatch};
use crate::torsion::verify_binormal;

/// `verify_binormal` bound for [`canonical_patch`].
pub const CANONICAL_BINORMAL_TOLERANCE: f64 = 1e-6;
/// Probes used by [`canonical_patch`]; even, so symmetric domains never probe their midpoint.
pub const CANONICAL_PROBES: usize = 50;
/// Anti-Salkowski curves are sampled on `|t| ≤ ANTI_SALKOWSKI_EDGE / ℓ`.
pub const ANTI_SALKOWSKI_EDGE: f64 = 0.95;
/// Half-width of the truncated borderline domain.
pub const BORDERLINE_HALF_WIDTH: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntryKind {
    /// `α` has constant torsion and `β` is its binormal.
    ConstantTorsion,
    Helicoid,
    RightConoid,
    TangentDevelopable,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: f64,
    pub description: &'static str,
}

/// Catalogue line for `list`.
#[derive(Debug, Clone, PartialEq)]
pub struct EntryInfo {
    pub name: &'static str,
    pub params: &'static [ParamSpec],
    pub summary: &'static str,
}

const ELL_CIRCLE: &[ParamSpec] =
    &[ParamSpec { name: "ell", default: 0.5, description: "radius of the parallel, in (0, 1)" }];
const ELL_ANTI: &[ParamSpec] =
    &[ParamSpec { name: "ell", default: 1.0 / 3.0, description: "shape parameter, > 0 and != 1/sqrt(3)" }];
const HELICOID_PARAMS: &[ParamSpec] = &[
    ParamSpec { name: "a", default: 1.0, description: "pitch, != 0" },
    ParamSpec { name: "b", default: 0.0, description: "height offset" },
];

const CATALOGUE: &[EntryInfo] = &[
    EntryInfo {
        name: "parallel_circles",
        params: ELL_CIRCLE,
        summary: "binormal traces a parallel of the sphere; alpha is a circular helix",
    },
    EntryInfo {
        name: "anti_salkowski",
        params: ELL_ANTI,
        summary: "torsion 1, non-constant curvature; bounded parameter interval",
    },
    EntryInfo { name: "borderline", params: &[], summary: "binormal accumulates on the equator; complete surface" },
    EntryInfo { name: "helicoid", params: HELICOID_PARAMS, summary: "X = (0, 0, a t + b) + u (cos t, sin t, 0)" },
    EntryInfo {
        name: "right_conoid",
        params: &[],
        summary: "X = (0, 0, w(t)) + u (cos t, sin t, 0); Ricci iff w is affine (w defaults to t^2)",
    },
    EntryInfo {
        name: "tangent_developable",
        params: &[],
        summary: "tangent lines of a unit-speed helix; developable control",
    },
];

pub fn list() -> &'static [EntryInfo] {
    CATALOGUE
}

/// A gallery example: generating curves, torsion, domains and notes.
#[derive(Debug, Clone)]
pub struct GalleryEntry {
    pub name: String,
    pub kind: EntryKind,
    pub params: Vec<(String, f64)>,
    pub alpha: SpaceCurve,
    /// Ruling direction; for constant-torsion entries the binormal of `α`.
    pub beta: SpaceCurve,
    pub torsion: Option<f64>,
    /// Where the formulas are defined, as text (may be unbounded or open).
    pub natural_domain: String,
    /// Sub-interval on which `β` passes [`crate::torsion::validate_spherical`].
    pub construction_domain: Interval,
    pub u_range: Interval,
    pub notes: String,
    definitions: [CurveDefinition; 2],
}

impl GalleryEntry {
    /// Sampling domain of `α` and `β`.
    pub fn domain(&self) -> Interval {
        self.alpha.domain()
    }

    /// Expression-string definitions of `α` and `β`.
    pub fn definitions(&self) -> &[CurveDefinition; 2] {
        &self.definitions
    }

    /// `β` on the construction domain.
    pub fn construction_binormal(&self) -> Result<SpaceCurve> {
        self.beta.restrict(self.construction_domain)
    }

    /// The ruled patch `α + u β` over the sampling domain.
    pub fn patch(&self, u_range: Interval) -> Result<RuledPatch> {
        let canonical = match (self.kind, self.torsion) {
            (EntryKind::ConstantTorsion, Some(tau)) => Canonical::ConstantTorsion(tau),
            (EntryKind::Helicoid, _) => Canonical::Helicoid,
            _ => Canonical::None,
        };
        Ok(RuledPatch::new(self.alpha.clone(), self.beta.clone(), self.domain(), u_range)?
            .with_canonical(canonical)
            .with_label(self.to_string()))
    }

    pub fn default_patch(&self) -> Result<RuledPatch> {
        self.patch(self.u_range)
    }
}

impl fmt::Display for GalleryEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if !self.params.is_empty() {
            let ps: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            write!(f, "({})", ps.join(", "))?;
        }
        Ok(())
    }
}

fn iv(lo: f64, hi: f64) -> Interval {
    Interval::new(lo, hi).expect("gallery interval")
}

fn definition(name: String, xyz: [String; 3], domain: Interval, params: &[(&str, f64)]) -> CurveDefinition {
    let [x, y, z] = xyz;
    CurveDefinition {
        name: Some(name),
        variable: None,
        x,
        y,
        z,
        domain: [domain.lo, domain.hi],
        parameters: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
    }
}

/// Binormal tracing the parallel at height `sqrt(1 - ℓ²)`; `α` is a circular helix with torsion 1.
pub fn parallel_circles(ell: f64) -> Result<GalleryEntry> {
    if !(ell > 0.0 && ell < 1.0) {
        return Err(Error::InvalidArgument(format!("parallel_circles needs 0 < ell < 1, got {ell}")));
    }
    let r = (1.0 - ell * ell).sqrt();
    let w = 1.0 / ell;
    let domain = iv(0.0, 2.0 * PI * ell);
    let beta = SpaceCurve::new(format!("B_ell(ell={ell})"), domain, move |t: f64| {
        let (s, c) = (w * t).sin_cos();
        Ok(CurveJet {
            pos: Vector3::new(ell * s, -ell * c, r),
            d1: Vector3::new(c, s, 0.0),
            d2: Vector3::new(-w * s, w * c, 0.0),
            d3: Vector3::new(-w * w * c, -w * w * s, 0.0),
        })
    });
    let alpha = SpaceCurve::new(format!("alpha_ell(ell={ell})"), domain, move |t: f64| {
        let (s, c) = (w * t).sin_cos();
        Ok(CurveJet {
            pos: Vector3::new(-ell * r * c, -ell * r * s, -ell * t),
            d1: Vector3::new(r * s, -r * c, -ell),
            d2: Vector3::new(r * w * c, r * w * s, 0.0),
            d3: Vector3::new(-r * w * w * s, r * w * w * c, 0.0),
        })
    });
    let p = [("l", ell)];
    let definitions = [
        definition(
            "parallel_circles_alpha".into(),
            ["-l*sqrt(1 - l^2)*cos(t/l)".into(), "-l*sqrt(1 - l^2)*sin(t/l)".into(), "-l*t".into()],
            domain,
            &p,
        ),
        definition(
            "parallel_circles_binormal".into(),
            ["l*sin(t/l)".into(), "-l*cos(t/l)".into(), "sqrt(1 - l^2)".into()],
            domain,
            &p,
        ),
    ];
    Ok(GalleryEntry {
        name: "parallel_circles".into(),
        kind: EntryKind::ConstantTorsion,
        params: vec![("ell".into(), ell)],
        alpha,
        beta,
        torsion: Some(1.0),
        natural_domain: "R (periodic, one turn sampled)".into(),
        construction_domain: domain,
        u_range: iv(-2.0, 2.0),
        notes: "alpha holds up to translation; as ell -> 1 the parallel becomes a great circle and the surface \
                degenerates towards the helicoid"
            .into(),
        definitions,
    })
}

struct AntiSalkowski {
    ell: f64,
    root: f64,
    c: f64,
}

impl AntiSalkowski {
    /// `(θ, a, b, z, d)` as jets; `z` is the third component before the reflection.
    fn parts(&self, t: f64) -> Result<[Jet3; 5]> {
        let l = self.ell;
        if (l * t).abs() >= 1.0 {
            return Err(Error::OutOfDomain { t, lo: -1.0 / l, hi: 1.0 / l });
        }
        let tj = Jet3::variable(t);
        let asin = (tj * l).asin();
        let sq = (Jet3::constant(1.0) - tj.square() * (l * l)).sqrt();
        let theta = asin * (self.root / l);
        let a = tj.square() * (3.0 * l * l + 3.0 * l.powi(4)) - 2.0;
        let b = tj * sq * (self.root * (1.0 + 3.0 * l * l));
        let z = (asin * 2.0 + (asin * 2.0).sin()) / (4.0 * l * self.root);
        let d = sq * (-self.root);
        Ok([theta, a, b, z, d])
    }

    fn rotate(theta: Jet3, x: Jet3, y: Jet3, z: Jet3) -> CurveJet {
        let (c, s) = (theta.cos(), theta.sin());
        CurveJet::from_components(c * x - s * y, s * x + c * y, z)
    }

    fn alpha(&self, t: f64) -> Result<CurveJet> {
        let [theta, a, b, z, _] = self.parts(t)?;
        Ok(Self::rotate(theta, a * self.c, b * self.c, -z))
    }

    fn binormal(&self, t: f64) -> Result<CurveJet> {
        let [theta, _, _, _, d] = self.parts(t)?;
        let l = self.ell;
        let tj = Jet3::variable(t);
        let k = 1.0 / self.root;
        Ok(Self::rotate(theta, d * k, tj * (l * l * k), tj * (l * k)))
    }
}

/// Anti-Salkowski curve: torsion 1, curvature vanishing only at `t = 0`.
pub fn anti_salkowski(ell: f64) -> Result<GalleryEntry> {
    if !(ell > 0.0 && ell.is_finite()) {
        return Err(Error::InvalidArgument(format!("anti_salkowski needs ell > 0, got {ell}")));
    }
    let denom = 1.0 - 2.0 * ell * ell - 3.0 * ell.powi(4);
    if denom.abs() < 1e-9 {
        return Err(Error::InvalidArgument(format!("anti_salkowski is undefined at ell = 1/sqrt(3), got {ell}")));
    }
    let root = (1.0 + ell * ell).sqrt();
    let curve = std::sync::Arc::new(AntiSalkowski { ell, root, c: ell / denom });
    let edge = ANTI_SALKOWSKI_EDGE / ell;
    let domain = iv(-edge, edge);
    let (ca, cb) = (curve.clone(), curve);
    let alpha = SpaceCurve::new(format!("anti_salkowski_alpha(ell={ell})"), domain, move |t| ca.alpha(t));
    let beta = SpaceCurve::new(format!("anti_salkowski_binormal(ell={ell})"), domain, move |t| cb.binormal(t));

    let theta = "(sqrt(1 + l^2)*asin(l*t)/l)";
    let c = "(l/(1 - 2*l^2 - 3*l^4))";
    let a = "(-2 + 3*l^2*t^2 + 3*l^4*t^2)";
    let b = "(sqrt(1 + l^2)*(1 + 3*l^2)*t*sqrt(1 - l^2*t^2))";
    let z = "((2*asin(l*t) + sin(2*asin(l*t)))/(4*l*sqrt(1 + l^2)))";
    let d = "(-sqrt(1 + l^2)*sqrt(1 - l^2*t^2))";
    let s = "sqrt(1 + l^2)";
    let p = [("l", ell)];
    let definitions = [
        definition(
            "anti_salkowski_alpha".into(),
            [
                format!("cos{theta}*{c}*{a} - sin{theta}*{c}*{b}"),
                format!("sin{theta}*{c}*{a} + cos{theta}*{c}*{b}"),
                format!("-{z}"),
            ],
            domain,
            &p,
        ),
        definition(
            "anti_salkowski_binormal".into(),
            [
                format!("(cos{theta}*{d} - sin{theta}*l^2*t)/{s}"),
                format!("(sin{theta}*{d} + cos{theta}*l^2*t)/{s}"),
                format!("l*t/{s}"),
            ],
            domain,
            &p,
        ),
    ];
    Ok(GalleryEntry {
        name: "anti_salkowski".into(),
        kind: EntryKind::ConstantTorsion,
        params: vec![("ell".into(), ell)],
        alpha,
        beta,
        torsion: Some(1.0),
        natural_domain: format!("(-{}, {})", 1.0 / ell, 1.0 / ell),
        construction_domain: iv(0.05 / ell, edge),
        u_range: iv(-1.0, 1.0),
        notes: "non-complete: t is confined to (-1/ell, 1/ell), sampled on |t| <= 0.95/ell; the curvature of \
                alpha vanishes at t = 0, where <B ^ B', B''> changes sign, so construction from B uses t > 0; \
                as ell -> 0 the binormal tends to a great circle (helicoid limit)"
            .into(),
        definitions,
    })
}

/// Spherical curve accumulating on the equator; complete surface.
pub fn borderline() -> GalleryEntry {
    let domain = iv(-BORDERLINE_HALF_WIDTH, BORDERLINE_HALF_WIDTH);
    let beta = SpaceCurve::new("borderline_binormal", domain, |t: f64| {
        let tj = Jet3::variable(t);
        let th = tj.tanh();
        Ok(CurveJet::from_components(th * tj.cos(), th * tj.sin(), tj.sech()))
    });
    let alpha = SpaceCurve::new("borderline_alpha", domain, |t: f64| {
        let tj = Jet3::variable(t);
        let sh = tj.sech();
        Ok(CurveJet::from_components(-(tj.cos() * sh), -(tj.sin() * sh), tj.tanh() - tj))
    });
    let definitions = [
        definition(
            "borderline_alpha".into(),
            ["-cos(t)*sech(t)".into(), "-sin(t)*sech(t)".into(), "tanh(t) - t".into()],
            domain,
            &[],
        ),
        definition(
            "borderline_binormal".into(),
            ["tanh(t)*cos(t)".into(), "tanh(t)*sin(t)".into(), "sech(t)".into()],
            domain,
            &[],
        ),
    ];
    GalleryEntry {
        name: "borderline".into(),
        kind: EntryKind::ConstantTorsion,
        params: Vec::new(),
        alpha,
        beta,
        torsion: Some(1.0),
        natural_domain: "R".into(),
        construction_domain: domain,
        u_range: iv(-2.0, 2.0),
        notes: "complete on R; sampled on [-4, 4] since B approaches the equator (sech(10) < 1e-4)".into(),
        definitions,
    }
}

fn circle_ruling(domain: Interval) -> SpaceCurve {
    SpaceCurve::new("(cos t, sin t, 0)", domain, |t: f64| {
        let (s, c) = t.sin_cos();
        Ok(CurveJet {
            pos: Vector3::new(c, s, 0.0),
            d1: Vector3::new(-s, c, 0.0),
            d2: Vector3::new(-c, -s, 0.0),
            d3: Vector3::new(s, -c, 0.0),
        })
    })
}

fn circle_ruling_definition(domain: Interval) -> CurveDefinition {
    definition("ruling".into(), ["cos(t)".into(), "sin(t)".into(), "0".into()], domain, &[])
}

/// `X(t, u) = (0, 0, a t + b) + u (cos t, sin t, 0)`.
pub fn helicoid(a: f64, b: f64) -> Result<GalleryEntry> {
    if a == 0.0 || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidArgument(format!("helicoid needs a finite non-zero pitch, got a = {a}")));
    }
    let domain = iv(-PI, PI);
    let alpha = SpaceCurve::new(format!("(0, 0, {a} t + {b})"), domain, move |t: f64| {
        Ok(CurveJet {
            pos: Vector3::new(0.0, 0.0, a * t + b),
            d1: Vector3::new(0.0, 0.0, a),
            d2: Vector3::zeros(),
            d3: Vector3::zeros(),
        })
    });
    let definitions = [
        definition("helicoid_axis".into(), ["0".into(), "0".into(), "a*t + b".into()], domain, &[("a", a), ("b", b)]),
        circle_ruling_definition(domain),
    ];
    Ok(GalleryEntry {
        name: "helicoid".into(),
        kind: EntryKind::Helicoid,
        params: vec![("a".into(), a), ("b".into(), b)],
        alpha,
        beta: circle_ruling(domain),
        torsion: None,
        natural_domain: "R".into(),
        construction_domain: domain,
        u_range: iv(-2.0, 2.0),
        notes: "the striction line is straight, so curvature is zero and torsion undefined; the ruling traces a \
                great circle"
            .into(),
        definitions,
    })
}

/// `X(t, u) = (0, 0, w(t)) + u (cos t, sin t, 0)` for an expression `w` in `t`.
pub fn right_conoid(w: &Expression) -> Result<GalleryEntry> {
    let values = w.bind(&BTreeMap::new())?;
    let domain = iv(0.5, 1.5);
    let expr = w.clone();
    let alpha = SpaceCurve::new(format!("(0, 0, {})", w.source()), domain, move |t: f64| {
        let z = expr.eval_resolved(t, &values)?;
        Ok(CurveJet::from_components(Jet3::constant(0.0), Jet3::constant(0.0), z))
    });
    let definitions = [
        definition("conoid_axis".into(), ["0".into(), "0".into(), w.source().to_string()], domain, &[]),
        circle_ruling_definition(domain),
    ];
    Ok(GalleryEntry {
        name: "right_conoid".into(),
        kind: EntryKind::RightConoid,
        params: Vec::new(),
        alpha,
        beta: circle_ruling(domain),
        torsion: None,
        natural_domain: "domain of w".into(),
        construction_domain: domain,
        u_range: iv(-1.0, 1.0),
        notes: format!("w(t) = {}; lambda^2 = w'(t)^2, Ricci only for affine w", w.source()),
        definitions,
    })
}

/// Tangent developable of the unit-speed helix of radius and pitch 1/2.
pub fn tangent_developable() -> GalleryEntry {
    let c = 0.5f64.sqrt();
    let w = 1.0 / c;
    let domain = iv(0.0, 4.0);
    let helix = move |t: f64, order: usize| -> Vector3<f64> {
        let (s, co) = (w * t).sin_cos();
        let k = w.powi(order as i32);
        let z = [0.5 * w * t, 0.5 * w, 0.0, 0.0, 0.0][order];
        let (x, y) = match order % 4 {
            0 => (co, s),
            1 => (-s, co),
            2 => (-co, -s),
            _ => (s, -co),
        };
        Vector3::new(0.5 * k * x, 0.5 * k * y, z)
    };
    let alpha = SpaceCurve::new("unit-speed helix", domain, move |t: f64| {
        Ok(CurveJet { pos: helix(t, 0), d1: helix(t, 1), d2: helix(t, 2), d3: helix(t, 3) })
    });
    let beta = SpaceCurve::new("helix tangent", domain, move |t: f64| {
        Ok(CurveJet { pos: helix(t, 1), d1: helix(t, 2), d2: helix(t, 3), d3: helix(t, 4) })
    });
    let p = [("c", c)];
    let definitions = [
        definition("helix".into(), ["0.5*cos(t/c)".into(), "0.5*sin(t/c)".into(), "0.5*t/c".into()], domain, &p),
        definition(
            "helix_tangent".into(),
            ["-0.5/c*sin(t/c)".into(), "0.5/c*cos(t/c)".into(), "0.5/c".into()],
            domain,
            &p,
        ),
    ];
    GalleryEntry {
        name: "tangent_developable".into(),
        kind: EntryKind::TangentDevelopable,
        params: Vec::new(),
        alpha,
        beta,
        torsion: None,
        natural_domain: "R".into(),
        construction_domain: domain,
        u_range: iv(0.25, 1.25),
        notes: "curvature 1; the surface is singular along u = 0 (edge of regression), so u stays positive".into(),
        definitions,
    }
}

/// Look up an entry by name. `params` overrides defaults; `w` is the conoid profile.
pub fn by_name(name: &str, params: &BTreeMap<String, f64>, w: Option<&str>) -> Result<GalleryEntry> {
    let info = CATALOGUE.iter().find(|e| e.name == name).ok_or_else(|| Error::UnknownEntry(name.to_string()))?;
    for key in params.keys() {
        if !info.params.iter().any(|p| p.name == key) {
            return Err(Error::InvalidArgument(format!("gallery entry `{name}` has no parameter `{key}`")));
        }
    }
    if w.is_some() && name != "right_conoid" {
        return Err(Error::InvalidArgument(format!("gallery entry `{name}` takes no profile expression")));
    }
    let get = |key: &str| -> f64 {
        params.get(key).copied().unwrap_or_else(|| info.params.iter().find(|p| p.name == key).unwrap().default)
    };
    match name {
        "parallel_circles" => parallel_circles(get("ell")),
        "anti_salkowski" => anti_salkowski(get("ell")),
        "borderline" => Ok(borderline()),
        "helicoid" => helicoid(get("a"), get("b")),
        "right_conoid" => right_conoid(&Expression::of_t(w.unwrap_or("t^2"))?),
        "tangent_developable" => Ok(tangent_developable()),
        _ => unreachable!("catalogue and constructors agree"),
    }
}

/// `(α, β)` as a ruled patch, after checking that `β` is the binormal of `α`.
pub fn canonical_patch(entry: &GalleryEntry, u_range: Interval) -> Result<RuledPatch> {
    let Some(tau) = entry.torsion.filter(|_| entry.kind == EntryKind::ConstantTorsion) else {
        return Err(Error::NotCanonical {
            t: entry.domain().midpoint(),
            what: format!("gallery entry `{}` is not a constant-torsion curve with its binormal", entry.name),
        });
    };
    let dev = verify_binormal(&entry.alpha, &entry.beta, CANONICAL_PROBES)?;
    if dev > CANONICAL_BINORMAL_TOLERANCE {
        return Err(Error::NotCanonical {
            t: entry.domain().midpoint(),
            what: format!("binormal deviation {dev:e} exceeds {CANONICAL_BINORMAL_TOLERANCE:e}"),
        });
    }
    Ok(entry.patch(u_range)?.with_canonical(Canonical::ConstantTorsion(tau)))
}

/// The constant-torsion entries at the parameter values shown in the examples' figures.
pub fn constant_torsion_family() -> Vec<GalleryEntry> {
    let mut out: Vec<GalleryEntry> =
        [0.25, 0.5, 0.75].into_iter().map(|l| parallel_circles(l).expect("valid ell")).collect();
    out.extend([0.1, 1.0 / 3.0, 0.57].into_iter().map(|l| anti_salkowski(l).expect("valid ell")));
    out.push(borderline());
    out
}

/// Every patch the gallery can produce with default settings, constant-torsion ones first.
pub fn all_patches() -> Result<Vec<RuledPatch>> {
    let mut out = Vec::new();
    for e in constant_torsion_family() {
        out.push(canonical_patch(&e, e.u_range)?);
    }
    out.push(helicoid(1.0, 0.0)?.default_patch()?);
    out.push(right_conoid(&Expression::of_t("t^2")?)?.default_patch()?);
    out.push(right_conoid(&Expression::of_t("3*t + 1")?)?.default_patch()?);
    out.push(tangent_developable().default_patch()?);
    Ok(out)
}
