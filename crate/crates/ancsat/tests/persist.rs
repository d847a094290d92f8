use ancsat::experiment::{run_experiment, run_one};
use ancsat::persist::{read_boundary, read_json, read_trajectory, SummaryFile};
use ancsat::presets::{preset, PresetName};
use ancsat_core::controllers::Algorithm;

#[test]
fn written_runs_read_back_exactly() {
    let mut e = preset(PresetName::Fig5Varying, 3).unwrap();
    e.apply_overrides(&["n_samples=20000", "record_stride=7"]).unwrap();
    let tmp = tempfile::tempdir().unwrap();
    let c = run_experiment(&e, &Algorithm::ALL, tmp.path()).unwrap();
    for a in &c.algorithms {
        let out = run_one(&e, a.algorithm).unwrap();
        assert_eq!(read_trajectory(&tmp.path().join(&a.trajectory_file)).unwrap(), out.trajectory);
        let s: SummaryFile = read_json(&tmp.path().join(&a.summary_file)).unwrap();
        assert_eq!(s.summary, out.summary);
        assert_eq!(s.config, e.scenario_for(a.algorithm));
    }
    assert_eq!(read_json::<ancsat::experiment::Comparison>(&tmp.path().join("fig5-varying.comparison.json")).unwrap(), c);

    // one constraint boundary per phase, each on its own power contour
    assert_eq!(c.boundary_files.len(), 2);
    for (file, phase) in c.boundary_files.iter().zip(&c.analysis.as_ref().unwrap().phases) {
        let points = read_boundary(&tmp.path().join(file)).unwrap();
        assert!(points.len() > 100);
        for [a, b] in points {
            // identity secondary path and white unit-variance reference: R_x ≈ I
            assert!(((a * a + b * b) / phase.rho_sq - 1.0).abs() < 0.05);
        }
    }
}
