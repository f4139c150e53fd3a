//! End-to-end tests of the command-line front end: exit codes, output
//! contracts, and determinism of persisted artifacts.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_planiso"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn tmp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("planiso-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn norris_prints_projections() {
    let out = run(&["norris"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("\"mu_euclid_gpa\": 2.736"));
    assert!(text.contains("mu_log_gpa"));
    assert!(text.contains("reverse_family_euclid_gpa"));
}

#[test]
fn config_errors_exit_with_code_2() {
    // Malformed config file.
    let dir = tmp_dir("badcfg");
    let cfg = dir.join("bad.cfg");
    std::fs::write(&cfg, "material.mu_gpa = not-a-number\n").unwrap();
    let out = run(&["norris", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    // Inadmissible material via override.
    let out = run(&["norris", "--set", "material.kappa_gpa=-3"]);
    assert_eq!(out.status.code(), Some(2));

    // Unknown key.
    let out = run(&["fem-fit", "--set", "material.youngs=1"]);
    assert_eq!(out.status.code(), Some(2));

    // Missing config file.
    let out = run(&["norris", "--config", "/nonexistent/path.cfg"]);
    assert_eq!(out.status.code(), Some(2));

    // Unknown table number.
    let out = run(&["reproduce-table", "7"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn analytic_eval_flags_singular_points_and_continues() {
    let dir = tmp_dir("aeval");
    let pts = dir.join("pts.csv");
    std::fs::write(&pts, "x1,x2\n0.02,0.0\n0.0,0.0\n0.0,0.02\n").unwrap();
    let out = run(&[
        "analytic-eval",
        "--kind",
        "dilatation",
        "--points-file",
        pts.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x1,x2,u1,u2"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[1].ends_with("nan,nan"), "singular row flagged: {}", rows[1]);
    assert!(!rows[0].contains("nan") && !rows[2].contains("nan"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("1 singular point"));
}

#[test]
fn analytic_eval_rejects_unknown_kind() {
    let out = run(&["analytic-eval", "--kind", "torsion", "--grid-extent", "0.1", "--grid-spacing", "0.05"]);
    assert_eq!(out.status.code(), Some(2));
}

fn small_scenario_args(out_dir: &Path) -> Vec<String> {
    [
        "fem-fit",
        "--set",
        "domain.side_m=0.2",
        "--set",
        "mesh.h_m=0.0006",
        "--set",
        "fit.radius_m=0.05",
        "--set",
        "fit.grid_spacing_m=0.005",
    ]
    .iter()
    .map(|s| s.to_string())
    .chain([
        "--set".to_string(),
        format!("output.dir={}", out_dir.display()),
    ])
    .collect()
}

/// Parse a run record and drop the fields that legitimately vary between
/// otherwise-identical runs: wall-clock timings and the output directory.
fn record_without_timings(path: &Path) -> serde_json::Value {
    let text = std::fs::read_to_string(path).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v.as_object_mut().unwrap().remove("timings");
    v["config"].as_object_mut().unwrap().remove("output_dir");
    v
}

#[test]
fn fem_fit_writes_artifacts_and_is_deterministic() {
    let base = tmp_dir("femfit");
    let (dir_a, dir_b) = (base.join("a"), base.join("b"));
    for dir in [&dir_a, &dir_b] {
        let args = small_scenario_args(dir);
        let out = bin().args(&args).output().unwrap();
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }

    // Artifacts exist with the exact CSV headers.
    for name in [
        "profile_couple.csv",
        "profile_dilatation.csv",
        "grid_couple.csv",
        "grid_dilatation.csv",
    ] {
        let text = std::fs::read_to_string(dir_a.join(name)).unwrap();
        let header = text.lines().next().unwrap();
        if name.starts_with("profile") {
            assert_eq!(header, "r,unorm");
        } else {
            assert_eq!(header, "x1,x2,u1,u2");
        }
        assert!(text.lines().count() > 10);
    }
    assert!(dir_a.join("field_couple.txt").exists());

    // The run record echoes the configuration and the fits.
    let record = record_without_timings(&dir_a.join("run_record.json"));
    assert_eq!(record["config"]["side_m"], 0.2);
    assert!(record["norm_fit"]["mu_iso"].as_f64().unwrap() > 0.0);
    assert!(record["norris"]["mu_log_gpa"].as_f64().unwrap() > 0.0);

    // Determinism: identical config gives identical results and identical
    // CSV bytes (timings excluded).
    assert_eq!(record, record_without_timings(&dir_b.join("run_record.json")));
    for name in ["profile_couple.csv", "grid_dilatation.csv"] {
        assert_eq!(
            std::fs::read(dir_a.join(name)).unwrap(),
            std::fs::read(dir_b.join(name)).unwrap(),
            "{name} differs between identical runs"
        );
    }
}
