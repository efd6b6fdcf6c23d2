use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ruled-ricci"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(|x| x.parse().unwrap_or(f64::NAN)).collect()).collect();
    (header, rows)
}

#[test]
fn borderline_mesh_has_grid_vertex_count() {
    let dir = tempfile::tempdir().unwrap();
    let o =
        run(&["construct", "--gallery", "borderline", "--u-range=-2,2", "--grid", "200x50", "--out", path(dir.path())]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let obj = fs::read_to_string(dir.path().join("surface.obj")).unwrap();
    assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 10_000);
    assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 199 * 49);
    let scalars = fs::read_to_string(dir.path().join("surface.scalars.csv")).unwrap();
    assert_eq!(scalars.lines().next(), Some("vertex,H,K"));
    assert_eq!(scalars.lines().count(), 10_001);
    assert_eq!(stdout_json(&o)["vertices"], 10_000);
}

#[test]
fn great_circle_is_a_validation_failure() {
    let dir = tempfile::tempdir().unwrap();
    let curve = dir.path().join("equator.toml");
    fs::write(&curve, "x = \"cos(t)\"\ny = \"sin(t)\"\nz = \"0\"\ndomain = [0.0, 3.0]\n").unwrap();
    let o = run(&["construct", "--binormal", path(&curve), "--out", path(dir.path())]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("great circle"), "{err}");
    let json_end = err.rfind('}').unwrap();
    let check: Value = serde_json::from_str(&err[..=json_end]).unwrap();
    assert_eq!(check["regular"], false);
    assert!(check["max_regularity"].as_f64().unwrap() < 1e-8);
    assert!(!dir.path().join("surface.obj").exists());
}

#[test]
fn off_sphere_binormal_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let curve = dir.path().join("b.toml");
    fs::write(&curve, "x = \"2*cos(t)\"\ny = \"2*sin(t)\"\nz = \"0\"\ndomain = [0.0, 1.0]\n").unwrap();
    let o = run(&["construct", "--binormal", path(&curve), "--out", path(dir.path())]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("\"on_sphere\": false"));
}

#[test]
fn parallel_circles_alpha_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["construct", "--gallery", "parallel_circles", "--param", "ell=0.5", "--out", path(dir.path())]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = csv_rows(&fs::read_to_string(dir.path().join("alpha.csv")).unwrap());
    assert_eq!(header, ["t", "x", "y", "z"]);
    let l: f64 = 0.5;
    let r = l * (1.0 - l * l).sqrt();
    let mut worst = 0.0f64;
    for row in &rows {
        let t = row[0];
        let exact = [-r * (t / l).cos(), -r * (t / l).sin(), -l * t];
        for k in 0..3 {
            worst = worst.max((row[k + 1] - exact[k]).abs());
        }
    }
    assert!(worst <= 1e-6, "{worst}");
    assert_eq!(rows.len(), 100);
}

#[test]
fn binormal_file_round_trips_through_gallery_show() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["gallery", "show", "anti_salkowski", "--param", "ell=0.5", "--out", path(dir.path())]);
    assert_eq!(code(&o), 0);
    let beta = dir.path().join("beta.toml");
    // the printed domain crosses the inflection at t = 0; restrict to one side
    let text = fs::read_to_string(&beta).unwrap();
    let text: String = text
        .lines()
        .map(|l| if l.starts_with("domain") { "domain = [0.1, 1.9]".to_string() } else { l.to_string() } + "\n")
        .collect();
    fs::write(&beta, text).unwrap();
    let o = run(&["construct", "--binormal", path(&beta), "--tau0", "2", "--out", path(dir.path())]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary = stdout_json(&o);
    assert!(summary["binormal_deviation"].as_f64().unwrap() < 1e-6);
    assert_eq!(summary["tau0"], 2.0);
}

#[test]
fn helicoid_passes_and_conoid_fails() {
    let o = run(&["check", "--gallery", "helicoid", "--param", "a=1"]);
    assert_eq!(code(&o), 0);
    let j = stdout_json(&o);
    assert_eq!(j["pass"], true);
    assert_eq!(j["classification"]["class"], "ricci");

    let o = run(&["check", "--gallery", "right_conoid", "--w", "t^2"]);
    assert_eq!(code(&o), 1);
    let j = stdout_json(&o);
    assert_eq!(j["pass"], false);
    assert_eq!(j["classification"]["class"], "non_ricci");
    assert!(j["report"]["max_normalized_residual"].as_f64().unwrap() > 1e-3);

    let o = run(&["check", "--gallery", "right_conoid", "--w", "3*t + 1"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn refinement_reports_second_order() {
    let o = run(&["check", "--gallery", "parallel_circles", "--h2"]);
    assert_eq!(code(&o), 0);
    let order = stdout_json(&o)["report"]["convergence_order"].as_f64().unwrap();
    assert!((1.7..=2.3).contains(&order), "{order}");
    let o = run(&["check", "--gallery", "parallel_circles"]);
    assert!(stdout_json(&o)["report"]["convergence_order"].is_null());
}

#[test]
fn helicoid_report_columns() {
    let o = run(&["report", "--gallery", "helicoid"]);
    assert_eq!(code(&o), 0);
    let (header, rows) = csv_rows(&String::from_utf8(o.stdout).unwrap());
    assert_eq!(header.join(","), "t,u,E,F,G,K_closed,K_forms,H_closed,H_forms,lambda");
    assert_eq!(rows.len(), 400);
    for r in &rows {
        let k = -1.0 / (1.0 + r[1] * r[1]).powi(2);
        assert!((r[5] - k).abs() <= 1e-12 * k.abs(), "{r:?}");
        assert!((r[6] - k).abs() <= 1e-9 * k.abs(), "{r:?}");
        assert_eq!(r[7], 0.0);
        assert!(r[8].abs() <= 1e-10);
    }
}

#[test]
fn report_columns_agree_on_canonical_patch() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["report", "--gallery", "parallel_circles", "--param", "ell=0.75", "--out", path(dir.path())]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let (_, rows) = csv_rows(&fs::read_to_string(dir.path().join("report.csv")).unwrap());
    for r in &rows {
        assert!((r[5] - r[6]).abs() <= 1e-7 * r[5].abs(), "{r:?}");
        assert!((r[7] - r[8]).abs() <= 1e-7 * r[7].abs().max(1e-8), "{r:?}");
    }
}

#[test]
fn developable_report_is_flat() {
    let o = run(&["report", "--gallery", "tangent_developable", "--grid", "12x6"]);
    assert_eq!(code(&o), 0);
    let (header, rows) = csv_rows(&String::from_utf8(o.stdout).unwrap());
    assert_eq!(rows.len(), 72);
    let h_closed = header.iter().position(|h| h == "H_closed").unwrap();
    for r in &rows {
        assert!(r[5].abs() <= 1e-9 && r[6].abs() <= 1e-9, "{r:?}");
        assert!(r[h_closed].is_nan(), "non-canonical patches leave H_closed empty");
    }
}

#[test]
fn singular_sample_is_a_numeric_failure() {
    let o = run(&["report", "--gallery", "tangent_developable", "--u-range=0,1"]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn outputs_are_byte_identical_across_runs_and_thread_counts() {
    let mut outputs = Vec::new();
    for threads in ["1", "4", "4"] {
        let dir = tempfile::tempdir().unwrap();
        let o = bin()
            .env("RULED_RICCI_THREADS", threads)
            .args(["export", "--gallery", "anti_salkowski", "--grid", "30x9", "--out", path(dir.path())])
            .output()
            .unwrap();
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let files: Vec<Vec<u8>> = ["surface.obj", "surface.scalars.csv", "alpha.csv", "beta.csv"]
            .iter()
            .map(|f| fs::read(dir.path().join(f)).unwrap())
            .collect();
        let check = bin()
            .env("RULED_RICCI_THREADS", threads)
            .args(["check", "--gallery", "borderline", "--h2"])
            .output()
            .unwrap();
        outputs.push((files, o.stdout, check.stdout));
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn scene_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("beta.toml"),
        "x = \"l*sin(t/l)\"\ny = \"-l*cos(t/l)\"\nz = \"sqrt(1 - l^2)\"\ndomain = [0.0, 2.0]\n\n[parameters]\nl = 0.6\n",
    )
    .unwrap();
    let scene = dir.path().join("scene.toml");
    fs::write(
        &scene,
        "u_range = [-1.0, 1.0]\ngrid = [8, 5]\n\n[source]\nbinormal = \"beta.toml\"\ntau0 = -1.5\n\n[outputs]\ndir = \"out\"\n",
    )
    .unwrap();
    let o = run(&["construct", "--scene", path(&scene)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout_json(&o)["vertices"], 40);
    assert!(dir.path().join("out").join("surface.obj").exists());

    let out = dir.path().join("o2");
    let o = run(&["construct", "--scene", path(&scene), "--grid", "6x4", "--out", path(&out)]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["vertices"], 24);
    assert!(out.join("surface.obj").exists());

    let o = run(&["check", "--scene", path(&scene), "--h2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let j: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out").join("check.json")).unwrap()).unwrap();
    assert_eq!(j["classification"]["class"], "ricci");
    assert!((1.7..=2.3).contains(&j["report"]["convergence_order"].as_f64().unwrap()));
    let residuals = fs::read_to_string(dir.path().join("out").join("residuals.csv")).unwrap();
    assert_eq!(residuals.lines().next(), Some("t,u,K,residual,normalized"));
    assert_eq!(residuals.lines().count(), 8 * 5 + 1);

    let inline = dir.path().join("inline.toml");
    fs::write(
        &inline,
        "u_range = [-1.0, 1.0]\n\n[source.alpha]\nx = \"0\"\ny = \"0\"\nz = \"2*t\"\ndomain = [-1.0, 1.0]\n\n\
         [source.beta]\nx = \"cos(t)\"\ny = \"sin(t)\"\nz = \"0\"\ndomain = [-1.0, 1.0]\n",
    )
    .unwrap();
    let o = run(&["check", "--scene", path(&inline)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let j = stdout_json(&o);
    assert_eq!(j["classification"]["lambda_max"], 2.0);
}

#[test]
fn bad_inputs_map_to_exit_codes() {
    assert_eq!(code(&run(&["check", "--gallery", "catenoid"])), 2);
    assert_eq!(code(&run(&["check", "--gallery", "helicoid", "--grid", "3x10"])), 2);
    assert_eq!(code(&run(&["check", "--gallery", "helicoid", "--h", "-1"])), 2);
    assert_eq!(code(&run(&["check", "--gallery", "helicoid", "--param", "ell=2"])), 2);
    assert_eq!(code(&run(&["construct", "--gallery", "helicoid"])), 2);
    assert_eq!(code(&run(&["check"])), 2);
    assert_eq!(code(&run(&["check", "--scene", "/nonexistent/scene.toml"])), 4);
    let o = bin().env("RULED_RICCI_THREADS", "zero").args(["gallery", "list"]).output().unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn unwritable_output_is_an_io_failure() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("occupied");
    fs::write(&file, "").unwrap();
    let o = run(&["export", "--gallery", "helicoid", "--out", path(&file.join("sub"))]);
    assert_eq!(code(&o), 4);
}

#[test]
fn gallery_list_names_every_entry() {
    let o = run(&["gallery", "list"]);
    let text = String::from_utf8(o.stdout).unwrap();
    for name in ["parallel_circles", "anti_salkowski", "borderline", "helicoid", "right_conoid", "tangent_developable"]
    {
        assert!(text.contains(name));
    }
}
