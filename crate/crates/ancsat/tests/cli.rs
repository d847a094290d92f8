use std::path::Path;
use std::process::{Command, Output};

use ancsat::experiment::{read_sweep, AnalysisReport, Comparison};
use ancsat::persist::{read_json, read_psd, read_trajectory, sha256_hex, SummaryFile};
use ancsat::presets::{preset, PresetName};
use ancsat_core::controllers::Algorithm;

fn ancsat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ancsat")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn dir_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_writes_one_trajectory_per_algorithm() {
    let tmp = tempfile::tempdir().unwrap();
    let o = ancsat(&["run", "fig3-static", "--output-dir", dir_arg(tmp.path()), "--set", "n_samples=20000"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let c: Comparison = read_json(&tmp.path().join("fig3-static.comparison.json")).unwrap();
    assert_eq!(c.algorithms.len(), 4);
    for a in &c.algorithms {
        let trajectory = tmp.path().join(&a.trajectory_file);
        let records = read_trajectory(&trajectory).unwrap();
        assert!(!records.is_empty());
        let summary: SummaryFile = read_json(&tmp.path().join(&a.summary_file)).unwrap();
        assert_eq!(summary.trajectory_sha256, sha256_hex(&std::fs::read(&trajectory).unwrap()));
        assert_eq!(summary.config.algorithm.algorithm, a.algorithm);
        assert_eq!(summary.summary.final_weights, a.final_weights);
    }
    assert_eq!(c.boundary_files, ["fig3-static.boundary.csv"]);
    assert!(c.psd_file.is_none());
}

#[test]
fn saturation_run_writes_spectra() {
    let tmp = tempfile::tempdir().unwrap();
    let o = ancsat(&[
        "run",
        "fig2-saturation",
        "--algorithms",
        "fxlms",
        "--output-dir",
        dir_arg(tmp.path()),
        "--set",
        "n_samples=40000",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let trajectories: Vec<_> = std::fs::read_dir(tmp.path())
        .unwrap()
        .filter_map(|e| e.ok().map(|e| e.file_name().to_string_lossy().into_owned()))
        .filter(|n| n.ends_with(".trajectory.csv"))
        .collect();
    assert_eq!(trajectories, ["fig2-saturation_fxlms.trajectory.csv"]);
    let psd = read_psd(&tmp.path().join("fig2-saturation.psd.csv")).unwrap();
    assert!(psd.column("disturbance").is_some());
    assert!(psd.column("fxlms").is_some());
}

#[test]
fn invalid_custom_config_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let mut scenario = preset(PresetName::Fig3Static, 1).unwrap().scenario;
    scenario.algorithm.rho_sq = -1.0;
    let path = tmp.path().join("bad.json");
    std::fs::write(&path, serde_json::to_vec(&scenario).unwrap()).unwrap();
    let o = ancsat(&["run", "custom", "--config", dir_arg(&path), "--output-dir", dir_arg(tmp.path())]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("rho_sq"), "{}", stderr(&o));

    std::fs::write(&path, b"{ not json").unwrap();
    let o = ancsat(&["run", "--config", dir_arg(&path), "--output-dir", dir_arg(tmp.path())]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
}

#[test]
fn unknown_names_are_usage_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let out = dir_arg(tmp.path());
    for args in [
        &["run", "fig9", "--output-dir", out][..],
        &["run", "fig3-static", "--set", "bogus=1", "--output-dir", out],
        &["run", "fig3-static", "--algorithms", "lms", "--output-dir", out],
        &["sweep", "fig3-static", "--parameter", "taps", "--values", "1", "--output-dir", out],
        &["run"],
    ] {
        let o = ancsat(args);
        assert_eq!(code(&o), 2, "{args:?}: {}", stderr(&o));
        assert!(!stderr(&o).is_empty());
    }
}

#[test]
fn unwritable_output_is_an_io_error() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    std::fs::write(&blocker, b"").unwrap();
    let inside = blocker.join("out");
    let o = ancsat(&["run", "fig3-static", "--set", "n_samples=2000", "--output-dir", dir_arg(&inside)]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
    let o = ancsat(&["analyze", "fig3-static", "--output-dir", dir_arg(&inside)]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
}

#[test]
fn oversized_step_is_flagged_and_diverges() {
    let tmp = tempfile::tempdir().unwrap();
    let out = dir_arg(tmp.path());
    let o = ancsat(&["analyze", "fig3-static", "--output-dir", out]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let ok: AnalysisReport = read_json(&tmp.path().join("fig3-static.analysis.json")).unwrap();
    assert!(!ok.unstable_configuration);
    let bound = ok.phases[0].stability.mu1_bound;

    let mu = format!("mu1_initial={}", 3.0 * bound);
    let o = ancsat(&["analyze", "fig3-static", "--set", &mu, "--output-dir", out]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("unstable-configuration"));
    let flagged: AnalysisReport = read_json(&tmp.path().join("fig3-static.analysis.json")).unwrap();
    assert!(flagged.unstable_configuration);

    let o = ancsat(&["run", "fig3-static", "--algorithms", "fxlms", "--set", &mu, "--set", "n_samples=20000", "--output-dir", out]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("fxlms"));
}

#[test]
fn single_value_sweep_matches_run_with_override() {
    let tmp = tempfile::tempdir().unwrap();
    let out = dir_arg(tmp.path());
    let common = ["--set", "n_samples=30000", "--output-dir", out];
    let o = ancsat(&[&["sweep", "fig5-varying", "--parameter", "kappa", "--values", "0.5"][..], &common].concat());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = read_sweep(&tmp.path().join("fig5-varying.sweep_kappa.csv")).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].algorithm, Algorithm::TwoGradientMomentum);

    let o = ancsat(&[&["run", "fig5-varying", "--algorithms", "2gd-momentum-vss", "--set", "kappa=0.5"][..], &common].concat());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let c: Comparison = read_json(&tmp.path().join("fig5-varying.comparison.json")).unwrap();
    let a = c.get(Algorithm::TwoGradientMomentum).unwrap();
    assert_eq!(rows[0].steady_state_error_power, a.steady_state_error_power);
    assert_eq!(rows[0].steady_state_output_power, a.steady_state_output_power);
    assert_eq!(rows[0].convergence_sample, a.convergence_sample);
    assert_eq!(rows[0].violation_samples, a.violation_samples);
}

#[test]
fn seed_changes_results_and_repeats_exactly() {
    let run = |seed: &str| {
        let tmp = tempfile::tempdir().unwrap();
        let o = ancsat(&["run", "fig3-static", "--algorithms", "2gd", "--seed", seed, "--set", "n_samples=5000", "--output-dir", dir_arg(tmp.path())]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        std::fs::read(tmp.path().join("fig3-static_2gd.trajectory.csv")).unwrap()
    };
    assert_eq!(run("7"), run("7"));
    assert_ne!(run("7"), run("8"));
}
