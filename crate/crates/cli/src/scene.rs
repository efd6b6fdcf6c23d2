//! Scene files: what to build and how finely to sample it.
//!
//! ```toml
//! u_range = [-2.0, 2.0]
//! grid = [200, 50]
//! h = 1e-3
//!
//! [source]
//! gallery = "parallel_circles"
//! params = { ell = 0.5 }
//!
//! [outputs]
//! dir = "out"
//!
//! [tolerance]
//! ricci = 1e-3
//! ```
//!
//! A source is exactly one of: a gallery entry (`gallery`, `params`, `w`), a
//! spherical curve (`binormal`, `tau0`), or an explicit pair (`alpha`, `beta`).
//! Curves are a path to a curve TOML file or an inline table. Relative paths in
//! the file resolve against the scene's directory; flags resolve against the working directory.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use ruled_ricci::gallery::{self, EntryKind, GalleryEntry};
use ruled_ricci::ricci::DEFAULT_STEP;
use ruled_ricci::ruled::{Canonical, RuledPatch, CLASSIFY_TOLERANCE};
use ruled_ricci::torsion::DEFAULT_QUADRATURE_TOLERANCE;
use ruled_ricci::{CurveDefinition, Interval, SpaceCurve};
use serde::Deserialize;

use crate::failure::{CliResult, Failure};

pub const MIN_GRID: usize = 4;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    #[serde(default)]
    pub source: SourceSpec,
    pub u_range: Option<[f64; 2]>,
    pub grid: Option<[usize; 2]>,
    pub h: Option<f64>,
    #[serde(default)]
    pub outputs: Outputs,
    #[serde(default)]
    pub tolerance: Tolerances,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSpec {
    pub gallery: Option<String>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    pub w: Option<String>,
    pub binormal: Option<CurveSource>,
    pub tau0: Option<f64>,
    pub alpha: Option<CurveSource>,
    pub beta: Option<CurveSource>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum CurveSource {
    Path(PathBuf),
    Inline(CurveDefinition),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Threshold on the normalized Ricci residual.
    pub ricci: Option<f64>,
    pub classify: Option<f64>,
    pub quadrature: Option<f64>,
}

/// Scene after flags have been applied and every value checked.
#[derive(Debug, Clone)]
pub struct Scene {
    pub source: SourceSpec,
    /// Directory that relative curve paths are resolved against.
    pub base_dir: PathBuf,
    pub u_range: Option<Interval>,
    pub grid: Option<(usize, usize)>,
    pub h: f64,
    pub out_dir: Option<PathBuf>,
    pub ricci_tolerance: Option<f64>,
    pub classify_tolerance: f64,
    pub quadrature_tolerance: f64,
}

/// Command-line values that override the scene file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub gallery: Option<String>,
    pub params: Vec<(String, f64)>,
    pub w: Option<String>,
    pub binormal: Option<PathBuf>,
    pub tau0: Option<f64>,
    pub u_range: Option<[f64; 2]>,
    pub grid: Option<(usize, usize)>,
    pub h: Option<f64>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

impl Scene {
    pub fn load(path: Option<&Path>, flags: Overrides) -> CliResult<Scene> {
        let (file, base_dir) = match path {
            Some(p) => {
                let file: SceneFile =
                    toml::from_str(&read_text(p)?).map_err(|e| Failure::validation(format!("{}: {e}", p.display())))?;
                (file, p.parent().map(Path::to_path_buf).unwrap_or_default())
            }
            None => (SceneFile::default(), PathBuf::from(".")),
        };
        let mut source = file.source;
        if flags.gallery.is_some() || flags.binormal.is_some() {
            source = SourceSpec { tau0: source.tau0, ..SourceSpec::default() };
        }
        if let Some(g) = flags.gallery {
            source.gallery = Some(g);
        }
        if let Some(b) = flags.binormal {
            let cwd = std::env::current_dir().map_err(|e| Failure::io(Path::new("."), e))?;
            source.binormal = Some(CurveSource::Path(cwd.join(b)));
        }
        source.params.extend(flags.params);
        if flags.w.is_some() {
            source.w = flags.w;
        }
        if flags.tau0.is_some() {
            source.tau0 = flags.tau0;
        }
        let u_range = flags
            .u_range
            .or(file.u_range)
            .map(|[lo, hi]| Interval::new(lo, hi).map_err(|e| Failure::validation(format!("u_range: {e}"))))
            .transpose()?;
        let grid = flags.grid.or(file.grid.map(|[a, b]| (a, b)));
        if let Some((nt, nu)) = grid {
            if nt < MIN_GRID || nu < MIN_GRID {
                return Err(Failure::validation(format!("grid must be at least {MIN_GRID}x{MIN_GRID}, got {nt}x{nu}")));
            }
        }
        let h = flags.h.or(file.h).unwrap_or(DEFAULT_STEP);
        if !(h > 0.0 && h.is_finite()) {
            return Err(Failure::validation(format!("step h must be positive, got {h}")));
        }
        let positive = |name: &str, v: Option<f64>| -> CliResult<Option<f64>> {
            match v {
                Some(x) if !(x > 0.0 && x.is_finite()) => {
                    Err(Failure::validation(format!("{name} must be positive, got {x}")))
                }
                _ => Ok(v),
            }
        };
        Ok(Scene {
            source,
            u_range,
            grid,
            h,
            out_dir: flags.out.or(file.outputs.dir.map(|d| base_dir.join(d))),
            ricci_tolerance: positive("ricci tolerance", flags.tol.or(file.tolerance.ricci))?,
            classify_tolerance: positive("classify tolerance", file.tolerance.classify)?.unwrap_or(CLASSIFY_TOLERANCE),
            quadrature_tolerance: positive("quadrature tolerance", file.tolerance.quadrature)?
                .unwrap_or(DEFAULT_QUADRATURE_TOLERANCE),
            base_dir,
        })
    }

    pub fn grid_or(&self, default: (usize, usize)) -> (usize, usize) {
        self.grid.unwrap_or(default)
    }

    fn curve(&self, src: &CurveSource) -> CliResult<SpaceCurve> {
        let def = match src {
            CurveSource::Inline(d) => d.clone(),
            CurveSource::Path(p) => {
                let path = self.base_dir.join(p);
                CurveDefinition::from_toml(&read_text(&path)?)
                    .map_err(|e| Failure::validation(format!("{}: {e}", path.display())))?
            }
        };
        Ok(def.to_curve()?)
    }

    pub fn resolve(&self) -> CliResult<Source> {
        let s = &self.source;
        let has_pair = s.alpha.is_some() || s.beta.is_some();
        let count = [s.gallery.is_some(), s.binormal.is_some(), has_pair].iter().filter(|b| **b).count();
        if count != 1 {
            return Err(Failure::validation(
                "scene needs exactly one source: `gallery`, `binormal`, or `alpha` with `beta`",
            ));
        }
        if s.gallery.is_none() && (!s.params.is_empty() || s.w.is_some()) {
            return Err(Failure::validation("`params` and `w` only apply to gallery sources"));
        }
        if has_pair && s.tau0.is_some() {
            return Err(Failure::validation("`tau0` applies to spherical-curve and gallery sources"));
        }
        let tau0 = s.tau0.unwrap_or(1.0);
        if let Some(name) = &s.gallery {
            let entry = gallery::by_name(name, &s.params, s.w.as_deref())?;
            return Ok(Source::Gallery { entry: Box::new(entry), tau0 });
        }
        if let Some(b) = &s.binormal {
            return Ok(Source::Binormal { b: self.curve(b)?, tau0 });
        }
        match (&s.alpha, &s.beta) {
            (Some(a), Some(b)) => Ok(Source::Pair { alpha: self.curve(a)?, beta: self.curve(b)? }),
            _ => Err(Failure::validation("an explicit pair needs both `alpha` and `beta`")),
        }
    }
}

/// What a scene describes.
pub enum Source {
    Gallery { entry: Box<GalleryEntry>, tau0: f64 },
    Binormal { b: SpaceCurve, tau0: f64 },
    Pair { alpha: SpaceCurve, beta: SpaceCurve },
}

impl Source {
    pub fn label(&self) -> String {
        match self {
            Source::Gallery { entry, .. } => entry.to_string(),
            Source::Binormal { b, .. } => format!("binormal {}", b.label()),
            Source::Pair { alpha, beta } => format!("{} + u {}", alpha.label(), beta.label()),
        }
    }

    /// Spherical curve and torsion for the construction pipeline, if the source has one.
    pub fn spherical(&self) -> CliResult<(SpaceCurve, f64, Option<&GalleryEntry>)> {
        match self {
            Source::Gallery { entry, tau0 } if entry.kind == EntryKind::ConstantTorsion => {
                Ok((entry.construction_binormal()?, *tau0, Some(entry)))
            }
            Source::Gallery { entry, .. } => Err(Failure::validation(format!(
                "gallery entry `{}` is not generated by a spherical curve; use `export`, `check` or `report`",
                entry.name
            ))),
            Source::Binormal { b, tau0 } => Ok((b.clone(), *tau0, None)),
            Source::Pair { .. } => {
                Err(Failure::validation("an explicit alpha/beta pair has no spherical curve to construct from"))
            }
        }
    }
}

pub fn pair_patch(alpha: &SpaceCurve, beta: &SpaceCurve, u_range: Option<Interval>) -> CliResult<RuledPatch> {
    let u = u_range.ok_or_else(|| Failure::validation("an explicit alpha/beta pair needs `u_range`"))?;
    let (a, b) = (alpha.domain(), beta.domain());
    let t = Interval::new(a.lo.max(b.lo), a.hi.min(b.hi))
        .map_err(|_| Failure::validation("alpha and beta domains do not overlap"))?;
    Ok(RuledPatch::new(alpha.clone(), beta.clone(), t, u)?.with_canonical(Canonical::None))
}
