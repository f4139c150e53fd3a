//! Scenario configuration, orchestration, result persistence, and
//! reproduction of the reference tables.
//!
//! A scenario couples one material and domain geometry to two
//! finite-element solves (concentrated couple, then center of
//! dilatation), fits `(mu_iso, kappa_iso)` with both the radial-norm and
//! the full-field procedure, and records everything alongside the
//! closed-form Euclidean/logarithmic projections.
//!
//! Configuration is a flat `key = value` text format (GPa and meters at
//! the interface, SI internally); command-line flags override file
//! values.  Exit-code contract of the front end: 0 success, 1 numerical
//! failure, 2 configuration error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::fem::{
    self, generate_mesh_graded, DisplacementField, LoadKind, LoadMode, LoadSpec, SolveStats,
};
use crate::fitting::{
    self, default_angles_deg, fit_kappa_fullfield, fit_kappa_norm, fit_mu_fullfield, fit_mu_norm,
    grid_sample, log_radii, norm_residual, radial_average, FitReport, GridSample, RadialProfile,
};
use crate::moduli::{self, CubicModuli};

/// Bit-exact CSV header of radial-profile exports.
pub const PROFILE_CSV_HEADER: &str = "r,unorm";
/// Bit-exact CSV header of grid/field exports.
pub const GRID_CSV_HEADER: &str = "x1,x2,u1,u2";

/// Environment variable bounding the number of concurrently solved
/// sweep rows in table reproduction.
pub const THREADS_ENV: &str = "PLANISO_THREADS";

/// Number of radii in the norm-fit profile.
pub const N_RADII: usize = 200;

/// Errors of the front end, carrying the exit-code classification.
#[derive(Debug, Error)]
pub enum PipelineError {
    /// Configuration / validation problem (exit code 2).
    #[error("configuration error: {0}")]
    Config(String),
    /// Numerical failure during solve or fit (exit code 1).
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => 2,
            PipelineError::Numerical(_) | PipelineError::Io(_) => 1,
        }
    }
}

impl From<fem::FemError> for PipelineError {
    fn from(e: fem::FemError) -> Self {
        match e {
            fem::FemError::InvalidGeometry(msg) => PipelineError::Config(msg),
            other => PipelineError::Numerical(other.to_string()),
        }
    }
}

impl From<fitting::FitError> for PipelineError {
    fn from(e: fitting::FitError) -> Self {
        PipelineError::Numerical(e.to_string())
    }
}

impl From<moduli::ModuliError> for PipelineError {
    fn from(e: moduli::ModuliError) -> Self {
        PipelineError::Config(e.to_string())
    }
}

/// Scenario parameters in interface units (GPa, meters).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub kappa_gpa: f64,
    pub mu_gpa: f64,
    pub mu_star_gpa: f64,
    pub side_m: f64,
    pub hole_diameter_m: f64,
    pub h_m: f64,
    pub fit_radius_m: f64,
    pub grid_spacing_m: f64,
    pub angles_deg: Vec<f64>,
    pub load_mode: String,
    pub output_dir: PathBuf,
    /// Inner bound of the norm-fit window, as a multiple of the hole
    /// radius (extension key `fit.inner_radius_factor`).
    pub inner_radius_factor: f64,
    /// Radial sample spacing of the norm-fit profile: `log` or `linear`
    /// (extension key `fit.radial_spacing`).
    pub radial_spacing: String,
    /// Radial grading factor of the mesh (extension key
    /// `mesh.radial_factor`); values below 1 refine radially.
    pub radial_factor: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            kappa_gpa: 7.645,
            mu_gpa: 5.901,
            mu_star_gpa: 0.626,
            side_m: 1.0,
            hole_diameter_m: 0.01,
            h_m: 2.0e-4,
            fit_radius_m: 0.25,
            grid_spacing_m: 0.005,
            angles_deg: default_angles_deg(),
            load_mode: "analytic".into(),
            output_dir: PathBuf::from("out"),
            inner_radius_factor: 2.0,
            radial_spacing: "log".into(),
            radial_factor: 1.0,
        }
    }
}

impl ScenarioConfig {
    /// Parse the flat `key = value` format; unknown keys are rejected.
    /// Lines starting with `#` and blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self, PipelineError> {
        let mut cfg = ScenarioConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                PipelineError::Config(format!("line {}: expected key = value", lineno + 1))
            })?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| PipelineError::Config(format!("line {}: {}", lineno + 1, e)))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Apply one key; shared by file parsing and CLI overrides.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let num = |v: &str| -> Result<f64, String> {
            v.parse::<f64>().map_err(|_| format!("invalid number '{v}'"))
        };
        match key {
            "material.kappa_gpa" => self.kappa_gpa = num(value)?,
            "material.mu_gpa" => self.mu_gpa = num(value)?,
            "material.mu_star_gpa" => self.mu_star_gpa = num(value)?,
            "domain.side_m" => self.side_m = num(value)?,
            "domain.hole_diameter_m" => self.hole_diameter_m = num(value)?,
            "mesh.h_m" => self.h_m = num(value)?,
            "mesh.radial_factor" => self.radial_factor = num(value)?,
            "fit.radius_m" => self.fit_radius_m = num(value)?,
            "fit.grid_spacing_m" => self.grid_spacing_m = num(value)?,
            "fit.inner_radius_factor" => self.inner_radius_factor = num(value)?,
            "fit.radial_spacing" => match value {
                "log" | "linear" => self.radial_spacing = value.to_string(),
                other => return Err(format!("unknown radial spacing '{other}'")),
            },
            "fit.angles_deg" => {
                let mut angles = Vec::new();
                for part in value.split(',') {
                    angles.push(num(part.trim())?);
                }
                if angles.is_empty() {
                    return Err("empty angle list".into());
                }
                self.angles_deg = angles;
            }
            "load.mode" => match value {
                "analytic" | "uniform" => self.load_mode = value.to_string(),
                other => return Err(format!("unknown load mode '{other}'")),
            },
            "output.dir" => self.output_dir = PathBuf::from(value),
            other => return Err(format!("unknown key '{other}'")),
        }
        Ok(())
    }

    /// Serialize back to the flat format; `parse(serialize(x)) == x`.
    pub fn serialize(&self) -> String {
        let angles = self
            .angles_deg
            .iter()
            .map(|a| format!("{a}"))
            .collect::<Vec<_>>()
            .join(",");
        let mut s = String::new();
        let _ = writeln!(s, "material.kappa_gpa = {}", self.kappa_gpa);
        let _ = writeln!(s, "material.mu_gpa = {}", self.mu_gpa);
        let _ = writeln!(s, "material.mu_star_gpa = {}", self.mu_star_gpa);
        let _ = writeln!(s, "domain.side_m = {}", self.side_m);
        let _ = writeln!(s, "domain.hole_diameter_m = {}", self.hole_diameter_m);
        let _ = writeln!(s, "mesh.h_m = {}", self.h_m);
        let _ = writeln!(s, "mesh.radial_factor = {}", self.radial_factor);
        let _ = writeln!(s, "fit.radius_m = {}", self.fit_radius_m);
        let _ = writeln!(s, "fit.grid_spacing_m = {}", self.grid_spacing_m);
        let _ = writeln!(s, "fit.inner_radius_factor = {}", self.inner_radius_factor);
        let _ = writeln!(s, "fit.radial_spacing = {}", self.radial_spacing);
        let _ = writeln!(s, "fit.angles_deg = {angles}");
        let _ = writeln!(s, "load.mode = {}", self.load_mode);
        let _ = writeln!(s, "output.dir = {}", self.output_dir.display());
        s
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let a = self.hole_radius_m();
        if !(a > 0.0 && 2.0 * a < self.side_m) {
            return Err(PipelineError::Config(format!(
                "hole diameter {} incompatible with side {}",
                self.hole_diameter_m, self.side_m
            )));
        }
        if !(self.h_m > 0.0 && self.h_m < a) {
            return Err(PipelineError::Config(format!(
                "mesh target h = {} must lie in (0, hole radius)",
                self.h_m
            )));
        }
        if !(self.fit_radius_m > self.inner_radius_factor * a) {
            return Err(PipelineError::Config(
                "fit radius must exceed the inner fit bound".into(),
            ));
        }
        if self.fit_radius_m > 0.5 * self.side_m {
            return Err(PipelineError::Config(
                "fit radius extends beyond the domain".into(),
            ));
        }
        if !(self.grid_spacing_m > 0.0) {
            return Err(PipelineError::Config("grid spacing must be positive".into()));
        }
        self.material()?;
        Ok(())
    }

    /// Material in SI units (Pa).
    pub fn material(&self) -> Result<CubicModuli, PipelineError> {
        Ok(CubicModuli::new(
            self.kappa_gpa * 1e9,
            self.mu_gpa * 1e9,
            self.mu_star_gpa * 1e9,
        )?)
    }

    pub fn hole_radius_m(&self) -> f64 {
        self.hole_diameter_m / 2.0
    }

    pub fn load_mode_enum(&self) -> LoadMode {
        match self.load_mode.as_str() {
            "uniform" => LoadMode::Uniform,
            _ => LoadMode::AnalyticTraction,
        }
    }
}

/// Closed-form projection references, in GPa.
#[derive(Debug, Clone, Serialize)]
pub struct NorrisReference {
    pub kappa_iso_gpa: f64,
    pub mu_euclid_gpa: f64,
    pub mu_log_gpa: f64,
}

pub fn norris_reference(m: &CubicModuli) -> NorrisReference {
    NorrisReference {
        kappa_iso_gpa: m.kappa() / 1e9,
        mu_euclid_gpa: moduli::norris_euclid(m).mu() / 1e9,
        mu_log_gpa: moduli::norris_log(m).mu() / 1e9,
    }
}

/// Mesh statistics recorded with each run.
#[derive(Debug, Clone, Serialize)]
pub struct MeshStats {
    pub nodes: usize,
    pub triangles: usize,
    pub n_theta: usize,
    pub n_rings: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveRecord {
    pub iterations: usize,
    pub residual: f64,
}

/// Wall-clock timings in seconds (excluded from determinism comparisons).
#[derive(Debug, Clone, Serialize)]
pub struct Timings {
    pub mesh_s: f64,
    pub couple_solve_s: f64,
    pub dilatation_solve_s: f64,
    pub fit_s: f64,
}

/// Complete record of one scenario run.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub config: ScenarioConfig,
    pub mesh: MeshStats,
    pub couple_solve: SolveRecord,
    pub dilatation_solve: SolveRecord,
    pub norm_fit: FitReport,
    pub fullfield_fit: FitReport,
    pub norris: NorrisReference,
    pub timings: Timings,
}

/// Raw field data kept alongside a run for export and further analysis.
pub struct RunFields {
    pub couple: DisplacementField,
    pub dilatation: DisplacementField,
    pub couple_profile: RadialProfile,
    pub dilatation_profile: RadialProfile,
    pub couple_grid: GridSample,
    pub dilatation_grid: GridSample,
}

fn fit_report(
    mu_iso: f64,
    kappa_iso: f64,
    mu_residual: f64,
    kappa_residual: f64,
    m: &CubicModuli,
) -> FitReport {
    let mu_log = moduli::norris_log(m).mu();
    let mu_euclid = moduli::norris_euclid(m).mu();
    FitReport {
        mu_iso,
        kappa_iso,
        mu_residual,
        kappa_residual,
        ratio_mu_log: mu_iso / mu_log,
        ratio_mu_euclid: mu_iso / mu_euclid,
        ratio_kappa: kappa_iso / m.kappa(),
    }
}

/// Run one scenario: two FEM solves, both fit procedures, all reports.
pub fn run_scenario(config: &ScenarioConfig) -> Result<(RunRecord, RunFields), PipelineError> {
    config.validate()?;
    let m = config.material()?;
    let a = config.hole_radius_m();
    let mode = config.load_mode_enum();

    let t0 = Instant::now();
    let mesh = Arc::new(generate_mesh_graded(
        config.side_m,
        a,
        config.h_m,
        config.radial_factor,
    )?);
    let mesh_s = t0.elapsed().as_secs_f64();
    let stats = MeshStats {
        nodes: mesh.n_nodes(),
        triangles: mesh.tris.len(),
        n_theta: mesh.n_theta,
        n_rings: mesh.n_rings,
    };

    let t0 = Instant::now();
    let (couple, couple_stats) = fem::solve_traction_problem(
        mesh.clone(),
        &m,
        LoadSpec {
            kind: LoadKind::Couple,
            mode,
        },
    )?;
    let couple_solve_s = t0.elapsed().as_secs_f64();

    let t0 = Instant::now();
    let (dilatation, dil_stats) = fem::solve_traction_problem(
        mesh.clone(),
        &m,
        LoadSpec {
            kind: LoadKind::Dilatation,
            mode,
        },
    )?;
    let dilatation_solve_s = t0.elapsed().as_secs_f64();

    let t0 = Instant::now();
    let r_inner = config.inner_radius_factor * a;
    let radii = match config.radial_spacing.as_str() {
        "linear" => fitting::linear_radii(r_inner, config.fit_radius_m, N_RADII),
        _ => log_radii(r_inner, config.fit_radius_m, N_RADII),
    };
    let couple_profile = radial_average(&couple, &radii, &config.angles_deg)?;
    let dilatation_profile = radial_average(&dilatation, &radii, &config.angles_deg)?;
    let mu_norm = fit_mu_norm(&couple_profile)?;
    let kappa_norm = fit_kappa_norm(&dilatation_profile, mu_norm)?;

    // Grid points cover the fit disk excluding the hole interior; points
    // on the hole boundary itself are kept.
    let grid_rmin = a * (1.0 - 1e-9);
    let couple_grid = grid_sample(&couple, config.grid_spacing_m, grid_rmin, config.fit_radius_m)?;
    let dilatation_grid = grid_sample(
        &dilatation,
        config.grid_spacing_m,
        grid_rmin,
        config.fit_radius_m,
    )?;
    let mu_ff = fit_mu_fullfield(&couple_grid)?;
    let kappa_ff = fit_kappa_fullfield(&dilatation_grid, mu_ff)?;
    let fit_s = t0.elapsed().as_secs_f64();

    let record = RunRecord {
        config: config.clone(),
        mesh: stats,
        couple_solve: solve_record(couple_stats),
        dilatation_solve: solve_record(dil_stats),
        norm_fit: fit_report(
            mu_norm,
            kappa_norm,
            norm_residual(&couple_profile, mu_norm),
            norm_residual(&dilatation_profile, mu_norm + kappa_norm),
            &m,
        ),
        fullfield_fit: fit_report(mu_ff, kappa_ff, f64::NAN, f64::NAN, &m),
        norris: norris_reference(&m),
        timings: Timings {
            mesh_s,
            couple_solve_s,
            dilatation_solve_s,
            fit_s,
        },
    };
    let fields = RunFields {
        couple,
        dilatation,
        couple_profile,
        dilatation_profile,
        couple_grid,
        dilatation_grid,
    };
    Ok((record, fields))
}

fn solve_record(s: SolveStats) -> SolveRecord {
    SolveRecord {
        iterations: s.iterations,
        residual: s.residual,
    }
}

/// Atomically write a file (temp file + rename).
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), PipelineError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn profile_csv(profile: &RadialProfile) -> String {
    let mut s = String::from(PROFILE_CSV_HEADER);
    s.push('\n');
    for (&r, &u) in profile.radii.iter().zip(&profile.ubar) {
        let _ = writeln!(s, "{r:.12e},{u:.12e}");
    }
    s
}

pub fn grid_csv(grid: &GridSample) -> String {
    let mut s = String::from(GRID_CSV_HEADER);
    s.push('\n');
    for (p, u) in grid.points.iter().zip(&grid.disps) {
        let _ = writeln!(s, "{:.12e},{:.12e},{:.12e},{:.12e}", p[0], p[1], u[0], u[1]);
    }
    s
}

/// Plain-text mesh/field export: node lines `x1 x2 u1 u2`, then triangle
/// lines `i j k` after a `triangles` marker.
pub fn field_export(field: &DisplacementField) -> String {
    let mut s = String::from("# nodes: x1 x2 u1 u2\n");
    for (i, n) in field.mesh.nodes.iter().enumerate() {
        let _ = writeln!(
            s,
            "{:.12e} {:.12e} {:.12e} {:.12e}",
            n[0],
            n[1],
            field.u[2 * i],
            field.u[2 * i + 1]
        );
    }
    s.push_str("# triangles: i j k\n");
    for t in &field.mesh.tris {
        let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
    }
    s
}

/// Run a scenario and persist the record, profiles, grids, and fields
/// under the configured output directory.
pub fn cmd_fem_fit(config: &ScenarioConfig) -> Result<RunRecord, PipelineError> {
    let (record, fields) = run_scenario(config)?;
    let dir = &config.output_dir;
    let json = serde_json::to_string_pretty(&record)
        .map_err(|e| PipelineError::Numerical(e.to_string()))?;
    write_atomic(&dir.join("run_record.json"), &(json + "\n"))?;
    write_atomic(
        &dir.join("profile_couple.csv"),
        &profile_csv(&fields.couple_profile),
    )?;
    write_atomic(
        &dir.join("profile_dilatation.csv"),
        &profile_csv(&fields.dilatation_profile),
    )?;
    write_atomic(&dir.join("grid_couple.csv"), &grid_csv(&fields.couple_grid))?;
    write_atomic(
        &dir.join("grid_dilatation.csv"),
        &grid_csv(&fields.dilatation_grid),
    )?;
    write_atomic(
        &dir.join("field_couple.txt"),
        &field_export(&fields.couple),
    )?;
    write_atomic(
        &dir.join("field_dilatation.txt"),
        &field_export(&fields.dilatation),
    )?;
    Ok(record)
}

// ---------------------------------------------------------------------------
// Table reproduction
// ---------------------------------------------------------------------------

/// Mesh target reproducing the reference tables: 320 angular divisions
/// with radial refinement.
pub const REPRO_H_M: f64 = 1.0e-4;
pub const REPRO_RADIAL_FACTOR: f64 = 0.75;
/// Inner bound of the norm-fit window for table reproduction, as a
/// multiple of the hole radius: the profile starts on the hole boundary.
pub const REPRO_INNER_FACTOR: f64 = 1.0;
/// Full-field grid spacing for table reproduction.  The reference
/// full-field values behave like the dense-sampling (continuum) limit of
/// the least-squares fit over the fit disk, so the grid is refined well
/// below the default spacing.
pub const REPRO_GRID_SPACING_M: f64 = 0.001;

/// The isotropic reference material of the consistency table (GPa).
pub const ISO_KAPPA_GPA: f64 = 7.645;
pub const ISO_MU_GPA: f64 = 5.901;
/// Second shear moduli of the cubic sweep (GPa).
pub const SWEEP_MU_STAR_GPA: [f64; 5] = [0.626, 1.967, 5.901, 17.70, 59.01];

/// One comparison row of a reproduced table.
#[derive(Debug, Clone, Serialize)]
pub struct TableRow {
    pub label: String,
    pub quantity: String,
    pub reference: f64,
    pub computed: f64,
    pub tolerance: f64,
}

impl TableRow {
    pub fn pass(&self) -> bool {
        (self.computed - self.reference).abs() <= self.tolerance
    }
}

fn repro_config(side_m: f64, mu_star_gpa: f64, load_mode: &str) -> ScenarioConfig {
    ScenarioConfig {
        kappa_gpa: ISO_KAPPA_GPA,
        mu_gpa: ISO_MU_GPA,
        mu_star_gpa,
        side_m,
        hole_diameter_m: 0.01,
        h_m: REPRO_H_M,
        fit_radius_m: 0.25,
        grid_spacing_m: REPRO_GRID_SPACING_M,
        angles_deg: default_angles_deg(),
        load_mode: load_mode.into(),
        output_dir: PathBuf::from("out"),
        inner_radius_factor: REPRO_INNER_FACTOR,
        radial_spacing: "linear".into(),
        radial_factor: REPRO_RADIAL_FACTOR,
    }
}

/// Fit ratios of one isotropic consistency run (norm and full-field).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Table1Outcome {
    pub norm_mu_ratio: f64,
    pub norm_kappa_ratio: f64,
    pub ff_mu_ratio: f64,
    pub ff_kappa_ratio: f64,
}

/// Solve the isotropic consistency scenario at one domain size.
pub fn table1_outcome(side_m: f64) -> Result<Table1Outcome, PipelineError> {
    let cfg = repro_config(side_m, ISO_MU_GPA, "analytic");
    let (record, _) = run_scenario(&cfg)?;
    let mu = ISO_MU_GPA * 1e9;
    let kappa = ISO_KAPPA_GPA * 1e9;
    Ok(Table1Outcome {
        norm_mu_ratio: record.norm_fit.mu_iso / mu,
        norm_kappa_ratio: record.norm_fit.kappa_iso / kappa,
        ff_mu_ratio: record.fullfield_fit.mu_iso / mu,
        ff_kappa_ratio: record.fullfield_fit.kappa_iso / kappa,
    })
}

/// Fit ratios of one cubic sweep row (shared by the norm-fit and
/// full-field tables).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepOutcome {
    pub mu_star_gpa: f64,
    /// Norm fit: mu_iso / mu_log and kappa_iso / kappa.
    pub norm_mu_ratio: f64,
    pub norm_kappa_ratio: f64,
    /// Full-field fit: same ratios.
    pub ff_mu_ratio: f64,
    pub ff_kappa_ratio: f64,
}

/// Solve one cubic sweep row (statically equivalent uniform load).
pub fn sweep_outcome(mu_star_gpa: f64) -> Result<SweepOutcome, PipelineError> {
    let cfg = repro_config(1.0, mu_star_gpa, "uniform");
    let (record, _) = run_scenario(&cfg)?;
    Ok(SweepOutcome {
        mu_star_gpa,
        norm_mu_ratio: record.norm_fit.mu_iso / (record.norris.mu_log_gpa * 1e9),
        norm_kappa_ratio: record.norm_fit.kappa_iso / (ISO_KAPPA_GPA * 1e9),
        ff_mu_ratio: record.fullfield_fit.mu_iso / (record.norris.mu_log_gpa * 1e9),
        ff_kappa_ratio: record.fullfield_fit.kappa_iso / (ISO_KAPPA_GPA * 1e9),
    })
}

/// Reference values of the isotropic consistency table, by domain size:
/// `(L, norm mu, norm kappa, disp mu, disp kappa, norm tol, disp tol)`.
///
/// Tolerances follow the acceptance bands at 1 m and 10 m; the same
/// bands hold at 0.5 m and 2.5 m under the pinned protocol.
pub const TABLE1_ROWS: [(f64, f64, f64, f64, f64, f64, f64); 4] = [
    (0.5, 1.0174, 1.0156, 1.1263, 1.1149, 0.01, 0.015),
    (1.0, 1.0042, 1.0039, 1.0289, 1.0265, 0.01, 0.015),
    (2.5, 1.0006, 1.0006, 1.0049, 1.0038, 0.01, 0.015),
    (10.0, 1.0001, 1.00001, 1.0003, 1.0002, 0.005, 0.005),
];

/// Reference rows of the norm-fit table: `(mu*, mu_iso/mu_log, kappa_iso/kappa)`.
pub const TABLE2_ROWS: [(f64, f64, f64); 5] = [
    (0.626, 1.03406, 0.99568),
    (1.967, 1.04654, 1.00434),
    (5.901, 1.0042, 1.00386),
    (17.70, 0.808581, 1.00302),
    (59.01, 0.494873, 1.00628),
];
pub const TABLE2_MU_TOL: f64 = 0.03;
pub const TABLE2_KAPPA_TOL: f64 = 0.015;

/// Reference rows of the full-field table.
pub const TABLE3_ROWS: [(f64, f64, f64); 5] = [
    (0.626, 1.24043, 1.03999),
    (1.967, 1.11925, 1.03357),
    (5.901, 1.0289, 1.02649),
    (17.70, 0.863217, 1.01104),
    (59.01, 0.575421, 1.03283),
];
pub const TABLE3_MU_TOL: f64 = 0.05;
pub const TABLE3_KAPPA_TOL: f64 = 0.02;

fn thread_budget(rows: usize) -> usize {
    let avail = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    let wanted = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| avail.min(4));
    wanted.min(rows).max(1)
}

/// Run a set of independent jobs on up to `threads` worker threads,
/// preserving result order.
fn run_parallel<T, F>(jobs: Vec<F>, threads: usize) -> Vec<T>
where
    T: Send,
    F: FnOnce() -> T + Send,
{
    if threads <= 1 {
        return jobs.into_iter().map(|j| j()).collect();
    }
    let mut slots: Vec<Option<T>> = jobs.iter().map(|_| None).collect();
    let queue: Vec<(usize, F)> = jobs.into_iter().enumerate().collect();
    let next = std::sync::Mutex::new(queue.into_iter());
    let slots_mutex = std::sync::Mutex::new(&mut slots);
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let job = { next.lock().unwrap().next() };
                match job {
                    Some((i, f)) => {
                        let out = f();
                        slots_mutex.lock().unwrap()[i] = Some(out);
                    }
                    None => break,
                }
            });
        }
    });
    slots.into_iter().map(|s| s.unwrap()).collect()
}

/// Reproduce one table; returns comparison rows in table order.
pub fn reproduce_table(table: u8) -> Result<Vec<TableRow>, PipelineError> {
    match table {
        1 => {
            let jobs: Vec<_> = TABLE1_ROWS
                .iter()
                .map(|&(side, ..)| move || table1_outcome(side))
                .collect();
            let outcomes = run_parallel(jobs, thread_budget(TABLE1_ROWS.len()));
            let mut rows = Vec::new();
            for (&(side, nm, nk, fm, fk, ntol, ftol), outcome) in
                TABLE1_ROWS.iter().zip(outcomes)
            {
                let o = outcome?;
                let label = format!("L = {side} m");
                for (quantity, reference, computed, tol) in [
                    ("mu_iso/mu (norm)", nm, o.norm_mu_ratio, ntol),
                    ("kappa_iso/kappa (norm)", nk, o.norm_kappa_ratio, ntol),
                    ("mu_iso/mu (disp)", fm, o.ff_mu_ratio, ftol),
                    ("kappa_iso/kappa (disp)", fk, o.ff_kappa_ratio, ftol),
                ] {
                    rows.push(TableRow {
                        label: label.clone(),
                        quantity: quantity.into(),
                        reference,
                        computed,
                        tolerance: tol,
                    });
                }
            }
            Ok(rows)
        }
        2 | 3 => {
            let jobs: Vec<_> = SWEEP_MU_STAR_GPA
                .iter()
                .map(|&ms| move || sweep_outcome(ms))
                .collect();
            let outcomes = run_parallel(jobs, thread_budget(SWEEP_MU_STAR_GPA.len()));
            let mut rows = Vec::new();
            for (i, outcome) in outcomes.into_iter().enumerate() {
                let o = outcome?;
                let label = format!("mu* = {} GPa", o.mu_star_gpa);
                if table == 2 {
                    let (_, pm, pk) = TABLE2_ROWS[i];
                    rows.push(TableRow {
                        label: label.clone(),
                        quantity: "mu_iso/mu_log (norm)".into(),
                        reference: pm,
                        computed: o.norm_mu_ratio,
                        tolerance: TABLE2_MU_TOL,
                    });
                    rows.push(TableRow {
                        label,
                        quantity: "kappa_iso/kappa (norm)".into(),
                        reference: pk,
                        computed: o.norm_kappa_ratio,
                        tolerance: TABLE2_KAPPA_TOL,
                    });
                } else {
                    let (_, pm, pk) = TABLE3_ROWS[i];
                    rows.push(TableRow {
                        label: label.clone(),
                        quantity: "mu_iso/mu_log (disp)".into(),
                        reference: pm,
                        computed: o.ff_mu_ratio,
                        tolerance: TABLE3_MU_TOL,
                    });
                    rows.push(TableRow {
                        label,
                        quantity: "kappa_iso/kappa (disp)".into(),
                        reference: pk,
                        computed: o.ff_kappa_ratio,
                        tolerance: TABLE3_KAPPA_TOL,
                    });
                }
            }
            Ok(rows)
        }
        other => Err(PipelineError::Config(format!(
            "unknown table {other}; expected 1, 2, or 3"
        ))),
    }
}
