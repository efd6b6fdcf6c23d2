use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use ruled_ricci::export::{
    scalar_sidecar_path, write_curve_csv, write_file, write_obj, write_residual_csv, write_surface_csv, MeshBuffer,
};
use ruled_ricci::gallery::{self, canonical_patch, GalleryEntry};
use ruled_ricci::ricci::{
    ricci_residual_fd, ricci_residual_fd_refined, GridSpec, MetricField, RicciReport, DEFAULT_THRESHOLD,
};
use ruled_ricci::ruled::{classify_with_tolerance, surface_records, Canonical, Classification, RuledPatch};
use ruled_ricci::torsion::{integrate_alpha, validate_spherical, verify_binormal, SphericalCurveCheck, MIN_PROBES};
use ruled_ricci::{Error, Interval, SpaceCurve};
use serde::Serialize;

use crate::failure::{CliResult, Failure, EXIT_CHECK_FAILED, EXIT_PASS};
use crate::scene::{pair_patch, Scene, Source};

const MESH_GRID: (usize, usize) = (100, 40);
const CHECK_GRID: (usize, usize) = (10, 10);
const REPORT_GRID: (usize, usize) = (20, 20);
const CLASSIFY_PROBES: usize = 50;
const BINORMAL_PROBES: usize = 100;
const FALLBACK_U_RANGE: [f64; 2] = [-1.0, 1.0];

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes") + "\n"
}

fn out_dir(scene: &Scene) -> CliResult<PathBuf> {
    let dir = scene.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|e| Failure::io(&dir, e))?;
    Ok(dir)
}

fn write_bytes(path: &Path, bytes: &[u8]) -> CliResult<()> {
    write_file(path, |w| w.write_all(bytes)).map_err(Failure::from)
}

/// Write to `<out>/<name>` when an output directory is set, else to stdout.
fn emit(scene: &Scene, name: &str, bytes: &[u8]) -> CliResult<()> {
    if scene.out_dir.is_some() {
        write_bytes(&out_dir(scene)?.join(name), bytes)
    } else {
        let mut stdout = std::io::stdout().lock();
        stdout.write_all(bytes).and_then(|_| stdout.flush()).map_err(|e| Failure::io(Path::new("<stdout>"), e))
    }
}

fn curve_csv(curve: &SpaceCurve, n: usize) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    write_curve_csv(curve, n, &mut buf)?;
    Ok(buf)
}

struct Constructed {
    alpha: SpaceCurve,
    check: SphericalCurveCheck,
    t0: f64,
    nodes: usize,
    binormal_deviation: f64,
    patch: RuledPatch,
}

/// Validate the spherical curve, integrate `α` and assemble the canonical patch.
fn construct_patch(scene: &Scene, b: &SpaceCurve, tau0: f64, entry: Option<&GalleryEntry>) -> CliResult<Constructed> {
    let check = validate_spherical(b, MIN_PROBES)?;
    if !check.passed() {
        eprint!("{}", to_json(&check));
        return Err(if check.is_great_circle() {
            Error::GreatCircle.into()
        } else {
            Failure::validation("spherical curve check failed")
        });
    }
    let mut built = integrate_alpha(b, tau0, None, scene.quadrature_tolerance)?;
    let t0 = built.base_point();
    if let Some(e) = entry {
        // the printed curve has torsion 1; scaling by 1/τ0 gives torsion τ0
        built = built.with_base_position(e.alpha.position(t0)? / tau0);
    }
    let alpha = built.to_curve();
    let binormal_deviation = verify_binormal(&alpha, b, BINORMAL_PROBES)?;
    let u =
        scene.u_range.or(entry.map(|e| e.u_range)).unwrap_or(Interval::new(FALLBACK_U_RANGE[0], FALLBACK_U_RANGE[1])?);
    let label = match entry {
        Some(e) => format!("{e} constructed with torsion {tau0}"),
        None => format!("constructed from {} with torsion {tau0}", b.label()),
    };
    let patch = RuledPatch::new(alpha.clone(), b.clone(), b.domain(), u)?
        .with_canonical(Canonical::ConstantTorsion(tau0))
        .with_label(label);
    Ok(Constructed { alpha, check, t0, nodes: built.node_count(), binormal_deviation, patch })
}

/// The patch a scene describes. Gallery entries use their printed curves unless a torsion other than 1 is asked for.
fn build_patch(scene: &Scene, source: &Source) -> CliResult<RuledPatch> {
    match source {
        Source::Gallery { entry, tau0 } => {
            let u = scene.u_range.unwrap_or(entry.u_range);
            match entry.torsion {
                Some(t) if *tau0 == t => Ok(canonical_patch(entry, u)?),
                Some(_) => Ok(construct_patch(scene, &entry.construction_binormal()?, *tau0, Some(entry))?.patch),
                None => Ok(entry.patch(u)?),
            }
        }
        Source::Binormal { b, tau0 } => Ok(construct_patch(scene, b, *tau0, None)?.patch),
        Source::Pair { alpha, beta } => pair_patch(alpha, beta, scene.u_range),
    }
}

#[derive(Serialize)]
struct ConstructSummary<'a> {
    source: String,
    tau0: f64,
    t0: f64,
    quadrature_tolerance: f64,
    nodes: usize,
    binormal_deviation: f64,
    spherical_check: &'a SphericalCurveCheck,
    t_range: [f64; 2],
    u_range: [f64; 2],
    grid: [usize; 2],
    vertices: usize,
    files: Vec<String>,
}

pub fn construct(scene: &Scene) -> CliResult {
    let source = scene.resolve()?;
    let (b, tau0, entry) = source.spherical()?;
    let c = construct_patch(scene, &b, tau0, entry)?;
    let (nt, nu) = scene.grid_or(MESH_GRID);
    let mesh = MeshBuffer::from_patch(&c.patch, nt, nu)?;
    let dir = out_dir(scene)?;
    write_bytes(&dir.join("alpha.csv"), &curve_csv(&c.alpha, nt)?)?;
    let obj = dir.join("surface.obj");
    write_obj(&mesh, &obj)?;
    let files =
        ["alpha.csv".to_string(), "surface.obj".into(), file_name(&scalar_sidecar_path(&obj)), "construct.json".into()];
    let summary = ConstructSummary {
        source: source.label(),
        tau0,
        t0: c.t0,
        quadrature_tolerance: scene.quadrature_tolerance,
        nodes: c.nodes,
        binormal_deviation: c.binormal_deviation,
        spherical_check: &c.check,
        t_range: interval(c.patch.t_range()),
        u_range: interval(c.patch.u_range()),
        grid: [nt, nu],
        vertices: mesh.vertices.len(),
        files: files.to_vec(),
    };
    let json = to_json(&summary);
    write_bytes(&dir.join("construct.json"), json.as_bytes())?;
    print!("{json}");
    Ok(EXIT_PASS)
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn interval(i: Interval) -> [f64; 2] {
    [i.lo, i.hi]
}

#[derive(Serialize)]
struct CheckOutput {
    source: String,
    classification: Classification,
    threshold: f64,
    pass: bool,
    report: RicciReport,
}

pub fn check(scene: &Scene, refine: bool) -> CliResult {
    let source = scene.resolve()?;
    let patch = build_patch(scene, &source)?;
    let field = MetricField::from_patch(&patch);
    let (nt, nu) = scene.grid_or(CHECK_GRID);
    let grid = GridSpec::interior(&field, nt, nu)?;
    let report = if refine {
        ricci_residual_fd_refined(&field, &grid, scene.h)?
    } else {
        ricci_residual_fd(&field, &grid, scene.h)?
    };
    let classification = classify_with_tolerance(&patch, CLASSIFY_PROBES, scene.classify_tolerance)?;
    let threshold = scene.ricci_tolerance.unwrap_or(DEFAULT_THRESHOLD);
    let pass = report.passes(threshold);
    let out = CheckOutput { source: patch.label().to_string(), classification, threshold, pass, report };
    emit(scene, "check.json", to_json(&out).as_bytes())?;
    if scene.out_dir.is_some() {
        let mut buf = Vec::new();
        write_residual_csv(&out.report.points, &mut buf).map_err(|e| Failure::io(Path::new("<residuals>"), e))?;
        write_bytes(&out_dir(scene)?.join("residuals.csv"), &buf)?;
    }
    Ok(if pass { EXIT_PASS } else { EXIT_CHECK_FAILED })
}

pub fn report(scene: &Scene) -> CliResult {
    let source = scene.resolve()?;
    let patch = build_patch(scene, &source)?;
    let (nt, nu) = scene.grid_or(REPORT_GRID);
    let records = surface_records(&patch, nt, nu)?;
    let mut buf = Vec::new();
    write_surface_csv(&records, &mut buf).map_err(|e| Failure::io(Path::new("<report>"), e))?;
    emit(scene, "report.csv", &buf)?;
    Ok(EXIT_PASS)
}

#[derive(Serialize)]
struct ExportSummary {
    source: String,
    t_range: [f64; 2],
    u_range: [f64; 2],
    grid: [usize; 2],
    vertices: usize,
    faces: usize,
    files: Vec<String>,
}

pub fn export(scene: &Scene) -> CliResult {
    let source = scene.resolve()?;
    let patch = build_patch(scene, &source)?;
    let (nt, nu) = scene.grid_or(MESH_GRID);
    let mesh = MeshBuffer::from_patch(&patch, nt, nu)?;
    let dir = out_dir(scene)?;
    let obj = dir.join("surface.obj");
    write_obj(&mesh, &obj)?;
    let t = patch.t_range();
    write_bytes(&dir.join("alpha.csv"), &curve_csv(&patch.alpha().restrict(t)?, nt)?)?;
    write_bytes(&dir.join("beta.csv"), &curve_csv(&patch.beta().restrict(t)?, nt)?)?;
    let summary = ExportSummary {
        source: patch.label().to_string(),
        t_range: interval(t),
        u_range: interval(patch.u_range()),
        grid: [nt, nu],
        vertices: mesh.vertices.len(),
        faces: mesh.quads.len(),
        files: vec!["surface.obj".into(), file_name(&scalar_sidecar_path(&obj)), "alpha.csv".into(), "beta.csv".into()],
    };
    print!("{}", to_json(&summary));
    Ok(EXIT_PASS)
}

pub fn gallery_list() -> CliResult {
    for info in gallery::list() {
        let params: Vec<String> = info.params.iter().map(|p| format!("{}={}", p.name, p.default)).collect();
        println!("{:<20} {:<14} {}", info.name, params.join(","), info.summary);
    }
    Ok(EXIT_PASS)
}

pub fn gallery_show(scene: &Scene) -> CliResult {
    let Source::Gallery { entry, .. } = scene.resolve()? else {
        return Err(Failure::validation("`gallery show` needs a gallery entry"));
    };
    let info = gallery::list().iter().find(|i| i.name == entry.name).expect("entry comes from the catalogue");
    let d = entry.domain();
    println!("# {entry}");
    println!("# {}", info.summary);
    for p in info.params {
        println!("# parameter {}: {} (default {})", p.name, p.description, p.default);
    }
    if let Some(t) = entry.torsion {
        println!("# torsion {t}");
    }
    println!("# natural domain {}", entry.natural_domain);
    println!(
        "# sampling domain [{}, {}], construction domain [{}, {}]",
        d.lo, d.hi, entry.construction_domain.lo, entry.construction_domain.hi
    );
    println!("# u range [{}, {}]", entry.u_range.lo, entry.u_range.hi);
    if !entry.notes.is_empty() {
        println!("# {}", entry.notes);
    }
    let [alpha, beta] = entry.definitions();
    println!("\n# alpha\n{}\n# beta\n{}", alpha.to_toml(), beta.to_toml());
    if let Some(dir) = &scene.out_dir {
        fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
        write_bytes(&dir.join("alpha.toml"), alpha.to_toml().as_bytes())?;
        write_bytes(&dir.join("beta.toml"), beta.to_toml().as_bytes())?;
    }
    Ok(EXIT_PASS)
}
