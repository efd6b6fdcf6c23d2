//! `ruled-ricci`: build ruled Ricci surfaces, check the Ricci condition and export meshes.
//!
//! Exit codes: 0 pass, 1 check failed, 2 validation, 3 numeric, 4 I/O.

mod commands;
mod failure;
mod scene;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use failure::{CliResult, Failure};
use scene::{Overrides, Scene};

/// Environment variable capping the worker thread count.
const THREADS_VAR: &str = "RULED_RICCI_THREADS";

#[derive(Parser)]
#[command(name = "ruled-ricci", version, about = "Ruled Ricci surfaces from constant-torsion curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Browse the built-in examples.
    Gallery {
        #[command(subcommand)]
        action: GalleryAction,
    },
    /// Integrate a curve of constant torsion from its spherical binormal; write alpha.csv and the surface mesh.
    Construct(SceneArgs),
    /// Finite-difference Ricci residual of the surface metric, as JSON; exit 1 above the threshold.
    Check {
        #[command(flatten)]
        scene: SceneArgs,
        /// Repeat at h/2 and report the convergence order.
        #[arg(long)]
        h2: bool,
    },
    /// Per-point table of fundamental forms and curvatures, as CSV.
    Report(SceneArgs),
    /// Surface mesh (OBJ plus scalar sidecar) and generating curves.
    Export(SceneArgs),
}

#[derive(Subcommand)]
enum GalleryAction {
    List,
    /// Describe an entry and print its curve definitions (written as TOML files with --out).
    Show {
        name: String,
        #[arg(long = "param", value_name = "KEY=VALUE", value_parser = parse_param)]
        params: Vec<(String, f64)>,
        /// Right conoid profile w(t).
        #[arg(long)]
        w: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct SceneArgs {
    /// Scene TOML file; flags override its values.
    #[arg(long)]
    scene: Option<PathBuf>,
    /// Gallery entry, instead of the scene's source.
    #[arg(long)]
    gallery: Option<String>,
    /// Gallery parameter, repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE", value_parser = parse_param)]
    params: Vec<(String, f64)>,
    /// Right conoid profile w(t).
    #[arg(long)]
    w: Option<String>,
    /// Curve TOML file with a unit-speed spherical curve, instead of the scene's source.
    #[arg(long)]
    binormal: Option<PathBuf>,
    /// Torsion of the constructed curve.
    #[arg(long, allow_hyphen_values = true)]
    tau0: Option<f64>,
    /// Ruling parameter range.
    #[arg(long, value_name = "LO,HI", value_parser = parse_range, allow_hyphen_values = true)]
    u_range: Option<[f64; 2]>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Sample grid, t by u.
    #[arg(long, value_name = "NxM", value_parser = parse_grid)]
    grid: Option<(usize, usize)>,
    /// Finite-difference step.
    #[arg(long)]
    h: Option<f64>,
    /// Threshold on the normalized Ricci residual.
    #[arg(long)]
    tol: Option<f64>,
}

impl SceneArgs {
    fn load(self) -> CliResult<Scene> {
        let flags = Overrides {
            gallery: self.gallery,
            params: self.params,
            w: self.w,
            binormal: self.binormal,
            tau0: self.tau0,
            u_range: self.u_range,
            grid: self.grid,
            h: self.h,
            tol: self.tol,
            out: self.out,
        };
        Scene::load(self.scene.as_deref(), flags)
    }
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected KEY=VALUE, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("parameter `{k}`: {e}"))?;
    Ok((k.trim().to_string(), v))
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected NxM, got `{s}`"))?;
    let n = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("grid `{s}`: {e}"));
    Ok((n(a)?, n(b)?))
}

fn parse_range(s: &str) -> Result<[f64; 2], String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected LO,HI, got `{s}`"))?;
    let n = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("range `{s}`: {e}"));
    Ok([n(a)?, n(b)?])
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::validation(format!("{THREADS_VAR} must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::validation(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> CliResult {
    configure_threads()?;
    match cli.command {
        Command::Gallery { action: GalleryAction::List } => commands::gallery_list(),
        Command::Gallery { action: GalleryAction::Show { name, params, w, out } } => {
            let flags = Overrides { gallery: Some(name), params, w, out, ..Overrides::default() };
            commands::gallery_show(&Scene::load(None, flags)?)
        }
        Command::Construct(args) => commands::construct(&args.load()?),
        Command::Check { scene, h2 } => commands::check(&scene.load()?, h2),
        Command::Report(args) => commands::report(&args.load()?),
        Command::Export(args) => commands::export(&args.load()?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code)
        }
    }
}
