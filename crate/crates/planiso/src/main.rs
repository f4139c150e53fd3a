//! Command-line front end.
//!
//! Subcommands:
//! - `norris`          closed-form isotropic projections of a cubic material
//! - `analytic-eval`   closed-form singular solutions on a point set
//! - `fem-fit`         full scenario: two FEM solves + both fit procedures
//! - `reproduce-table` re-run a reference table and compare row by row
//!
//! Exit codes: 0 success, 1 numerical failure, 2 configuration error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use planiso::greens::{
    self, AnalyticSolutionKind, FieldPoint, ForceDirection, GreensError,
};
use planiso::moduli::{self, CubicModuli};
use planiso::pipeline::{
    self, norris_reference, PipelineError, ScenarioConfig, GRID_CSV_HEADER,
};

#[derive(Parser)]
#[command(
    name = "planiso",
    about = "Plane-strain elasticity: singular solutions, FEM fits, isotropic projections",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the closed-form isotropic projections of a cubic material.
    Norris(ConfigArgs),
    /// Evaluate a closed-form singular solution on a point set (CSV out).
    AnalyticEval(AnalyticEvalArgs),
    /// Run the full FEM fitting scenario and persist all outputs.
    FemFit(ConfigArgs),
    /// Reproduce a reference table and compare against recorded values.
    ReproduceTable(ReproduceArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// Flat key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Inline overrides, e.g. `--set material.mu_gpa=5.901` (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

#[derive(Args)]
struct AnalyticEvalArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Solution kind: couple | dilatation | point-force-1 | point-force-2.
    #[arg(long, default_value = "couple")]
    kind: String,
    /// File with one `x1,x2` pair per line.
    #[arg(long, conflicts_with_all = ["grid_extent", "grid_spacing"])]
    points_file: Option<PathBuf>,
    /// Half-width of a centered square evaluation grid (meters).
    #[arg(long, requires = "grid_spacing")]
    grid_extent: Option<f64>,
    /// Spacing of the evaluation grid (meters).
    #[arg(long, requires = "grid_extent")]
    grid_spacing: Option<f64>,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ReproduceArgs {
    /// Table number: 1 (isotropic consistency), 2 (norm fit), 3 (full field).
    table: u8,
}

fn load_config(args: &ConfigArgs) -> Result<ScenarioConfig, PipelineError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                PipelineError::Config(format!("cannot read {}: {e}", path.display()))
            })?;
            ScenarioConfig::parse(&text)?
        }
        None => ScenarioConfig::default(),
    };
    for kv in &args.sets {
        let (key, value) = kv
            .split_once('=')
            .ok_or_else(|| PipelineError::Config(format!("--set expects KEY=VALUE, got '{kv}'")))?;
        cfg.set(key.trim(), value.trim())
            .map_err(PipelineError::Config)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Serialize)]
struct NorrisOutput {
    material_gpa: MaterialEcho,
    kappa_iso_gpa: f64,
    mu_euclid_gpa: f64,
    mu_log_gpa: f64,
    /// Sample members of the Euclidean reverse family (kappa, mu+3c, mu-2c)
    /// that all project onto the same isotropic pair.
    reverse_family_euclid_gpa: Vec<MaterialEcho>,
    /// Sample members of the logarithmic reverse family (kappa, mu c^3, mu/c^2).
    reverse_family_log_gpa: Vec<MaterialEcho>,
}

#[derive(Serialize)]
struct MaterialEcho {
    kappa: f64,
    mu: f64,
    mu_star: f64,
}

fn echo(m: &CubicModuli) -> MaterialEcho {
    MaterialEcho {
        kappa: m.kappa() / 1e9,
        mu: m.mu() / 1e9,
        mu_star: m.mu_star() / 1e9,
    }
}

fn cmd_norris(args: &ConfigArgs) -> Result<(), PipelineError> {
    let cfg = load_config(args)?;
    let m = cfg.material()?;
    let n = norris_reference(&m);
    let iso_e = moduli::norris_euclid(&m);
    let iso_l = moduli::norris_log(&m);
    let euclid_c = 0.1 * iso_e.mu();
    let log_c = 1.25;
    let out = NorrisOutput {
        material_gpa: echo(&m),
        kappa_iso_gpa: n.kappa_iso_gpa,
        mu_euclid_gpa: n.mu_euclid_gpa,
        mu_log_gpa: n.mu_log_gpa,
        reverse_family_euclid_gpa: [-euclid_c, 0.0, euclid_c]
            .iter()
            .map(|&c| moduli::reverse_family_euclid(&iso_e, c).map(|f| echo(&f)))
            .collect::<Result<_, _>>()?,
        reverse_family_log_gpa: [1.0 / log_c, 1.0, log_c]
            .iter()
            .map(|&c| moduli::reverse_family_log(&iso_l, c).map(|f| echo(&f)))
            .collect::<Result<_, _>>()?,
    };
    let json =
        serde_json::to_string_pretty(&out).map_err(|e| PipelineError::Numerical(e.to_string()))?;
    println!("{json}");
    Ok(())
}

fn parse_kind(s: &str) -> Result<AnalyticSolutionKind, PipelineError> {
    match s {
        "couple" => Ok(AnalyticSolutionKind::Couple),
        "dilatation" => Ok(AnalyticSolutionKind::Dilatation),
        "point-force-1" => Ok(AnalyticSolutionKind::PointForce(ForceDirection::X1)),
        "point-force-2" => Ok(AnalyticSolutionKind::PointForce(ForceDirection::X2)),
        other => Err(PipelineError::Config(format!(
            "unknown kind '{other}'; expected couple | dilatation | point-force-1 | point-force-2"
        ))),
    }
}

fn read_points(path: &PathBuf) -> Result<Vec<FieldPoint>, PipelineError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| PipelineError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut points = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line == "x1,x2" {
            continue;
        }
        let (a, b) = line.split_once(',').ok_or_else(|| {
            PipelineError::Config(format!("line {}: expected 'x1,x2'", lineno + 1))
        })?;
        let x1: f64 = a.trim().parse().map_err(|_| {
            PipelineError::Config(format!("line {}: invalid number '{a}'", lineno + 1))
        })?;
        let x2: f64 = b.trim().parse().map_err(|_| {
            PipelineError::Config(format!("line {}: invalid number '{b}'", lineno + 1))
        })?;
        points.push(FieldPoint { x1, x2 });
    }
    Ok(points)
}

fn cmd_analytic_eval(args: &AnalyticEvalArgs) -> Result<(), PipelineError> {
    let cfg = load_config(&args.config)?;
    let m = cfg.material()?;
    let kind = parse_kind(&args.kind)?;

    let points = if let Some(path) = &args.points_file {
        read_points(path)?
    } else if let (Some(extent), Some(spacing)) = (args.grid_extent, args.grid_spacing) {
        if !(extent > 0.0 && spacing > 0.0) {
            return Err(PipelineError::Config(
                "grid extent and spacing must be positive".into(),
            ));
        }
        let n = (extent / spacing).round() as i64;
        let mut pts = Vec::new();
        for i in -n..=n {
            for j in -n..=n {
                pts.push(FieldPoint {
                    x1: i as f64 * spacing,
                    x2: j as f64 * spacing,
                });
            }
        }
        pts
    } else {
        return Err(PipelineError::Config(
            "provide --points-file or --grid-extent with --grid-spacing".into(),
        ));
    };

    let mut csv = String::from(GRID_CSV_HEADER);
    csv.push('\n');
    let mut singular = 0usize;
    for p in &points {
        match greens::displacement(&m, kind, *p) {
            Ok(u) => {
                csv.push_str(&format!(
                    "{:.12e},{:.12e},{:.12e},{:.12e}\n",
                    p.x1, p.x2, u.0, u.1
                ));
            }
            Err(GreensError::SingularPoint) => {
                singular += 1;
                csv.push_str(&format!("{:.12e},{:.12e},nan,nan\n", p.x1, p.x2));
            }
            Err(e) => return Err(PipelineError::Numerical(e.to_string())),
        }
    }
    if singular > 0 {
        eprintln!("flagged {singular} singular point(s)");
    }
    match &args.output {
        Some(path) => pipeline::write_atomic(path, &csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn cmd_fem_fit(args: &ConfigArgs) -> Result<(), PipelineError> {
    let cfg = load_config(args)?;
    let record = pipeline::cmd_fem_fit(&cfg)?;
    println!(
        "mesh: {} nodes, {} triangles ({} x {})",
        record.mesh.nodes, record.mesh.triangles, record.mesh.n_theta, record.mesh.n_rings
    );
    println!(
        "norm fit:       mu_iso = {:.6} GPa  kappa_iso = {:.6} GPa",
        record.norm_fit.mu_iso / 1e9,
        record.norm_fit.kappa_iso / 1e9
    );
    println!(
        "full-field fit: mu_iso = {:.6} GPa  kappa_iso = {:.6} GPa",
        record.fullfield_fit.mu_iso / 1e9,
        record.fullfield_fit.kappa_iso / 1e9
    );
    println!(
        "references:     mu_euclid = {:.6}  mu_log = {:.6}  kappa = {:.6} GPa",
        record.norris.mu_euclid_gpa, record.norris.mu_log_gpa, record.norris.kappa_iso_gpa
    );
    println!("outputs written to {}", cfg.output_dir.display());
    Ok(())
}

fn cmd_reproduce(args: &ReproduceArgs) -> Result<(), PipelineError> {
    let rows = pipeline::reproduce_table(args.table)?;
    let mut failures = 0usize;
    for row in &rows {
        let status = if row.pass() { "pass" } else { "FAIL" };
        if !row.pass() {
            failures += 1;
        }
        println!(
            "[{status}] {:<14} {:<26} reference {:.5}  computed {:.5}  tol {:.3}",
            row.label, row.quantity, row.reference, row.computed, row.tolerance
        );
    }
    if failures > 0 {
        return Err(PipelineError::Numerical(format!(
            "{failures} of {} rows outside tolerance",
            rows.len()
        )));
    }
    println!("all {} rows within tolerance", rows.len());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Norris(args) => cmd_norris(args),
        Command::AnalyticEval(args) => cmd_analytic_eval(args),
        Command::FemFit(args) => cmd_fem_fit(args),
        Command::ReproduceTable(args) => cmd_reproduce(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
