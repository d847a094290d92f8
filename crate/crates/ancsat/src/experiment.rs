//! Running presets: all algorithms in parallel, output files, comparison
//! report, closed-form analysis and parameter sweeps.

use std::path::{Path, PathBuf};

use ancsat_core::acoustics::{convolve, generate, FirPath, NoiseKind};
use ancsat_core::analysis::{
    build_correlation_model, constraint_boundary, output_power, stability_bounds, wiener_optimal,
    wiener_suboptimal, CorrelationModel, CrossCorrelation, StabilityReport,
};
use ancsat_core::controllers::{lagrangian_factor, Algorithm, Varsigma};
use ancsat_core::harness::{
    run_scenario, PhaseSummary, RunOutput, RunStatus, ScenarioConfig, TrajectoryRecord,
    STEADY_STATE_FRACTION,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::persist::{write_boundary, write_json, write_psd, write_trajectory, PsdTable, SummaryFile};
use crate::presets::{apply_override, Experiment, PresetName};
use crate::spectrum::{welch_psd, Psd, DEFAULT_SEGMENT};

/// Trailing fraction of a run used for error spectra.
pub const SPECTRUM_FRACTION: f64 = 0.5;
/// Points on each written constraint boundary.
pub const BOUNDARY_POINTS: usize = 256;
/// Largest controller for which closed-form predictions are computed.
pub const ANALYSIS_MAX_TAPS: usize = 64;
/// Upper limit on samples used to estimate correlation statistics.
pub const ANALYSIS_SAMPLES: usize = 1 << 18;

/// Error power relative to the uncontrolled disturbance, per band, in dB.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandReport {
    pub in_band: (f64, f64),
    pub low_band: (f64, f64),
    pub high_band: (f64, f64),
    /// Negative values are attenuation.
    pub in_band_change_db: f64,
    pub low_band_change_db: f64,
    pub high_band_change_db: f64,
}

impl BandReport {
    pub fn max_out_of_band_change_db(&self) -> f64 {
        self.low_band_change_db.max(self.high_band_change_db)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmReport {
    pub algorithm: Algorithm,
    pub status: RunStatus,
    pub samples_run: usize,
    pub final_weights: Vec<f64>,
    pub steady_state_error_power: f64,
    pub steady_state_output_power: f64,
    pub convergence_sample: usize,
    pub convergence_resolution: usize,
    pub exceeded_samples: usize,
    pub violation_samples: usize,
    pub varsigma: f64,
    pub phases: Vec<PhaseSummary>,
    /// Standard deviation of each recorded weight over the steady-state tail
    /// of the last phase.
    pub steady_state_weight_std: Vec<f64>,
    #[serde(default)]
    pub bands: Option<BandReport>,
    pub trajectory_file: String,
    pub summary_file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub preset: PresetName,
    pub config: ScenarioConfig,
    pub synthetic_paths: bool,
    pub reference_points: Vec<[f64; 2]>,
    pub algorithms: Vec<AlgorithmReport>,
    #[serde(default)]
    pub psd_file: Option<String>,
    #[serde(default)]
    pub boundary_files: Vec<String>,
    #[serde(default)]
    pub analysis: Option<AnalysisReport>,
}

impl Comparison {
    pub fn get(&self, algorithm: Algorithm) -> Option<&AlgorithmReport> {
        self.algorithms.iter().find(|a| a.algorithm == algorithm)
    }

    pub fn any_diverged(&self) -> Option<&AlgorithmReport> {
        self.algorithms.iter().find(|a| matches!(a.status, RunStatus::Diverged { .. }))
    }
}

/// Closed-form predictions for one path configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseAnalysis {
    pub phase: usize,
    pub rho_sq: f64,
    pub sigma_d_sq: f64,
    /// ς as configured.
    pub varsigma: f64,
    /// ς from the Lagrangian factor for this phase's `σ_d²` and `ρ²`.
    pub varsigma_derived: f64,
    pub wiener_optimal: Vec<f64>,
    pub wiener_optimal_output_power: f64,
    /// Sub-optimum for the configured ς.
    pub wiener_suboptimal: Vec<f64>,
    /// Sub-optimum for the derived ς.
    pub wiener_suboptimal_derived: Vec<f64>,
    pub wiener_suboptimal_derived_output_power: f64,
    pub stability: StabilityReport,
    pub unstable_configuration: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub config: ScenarioConfig,
    pub analysis_samples: usize,
    pub mu1_initial: f64,
    pub kappa: f64,
    pub phases: Vec<PhaseAnalysis>,
    /// Set when μ₁(0) or ςμ₁(0) violates a bound in any phase.
    pub unstable_configuration: bool,
}

struct PhasePaths {
    primary: FirPath,
    rho_sq: f64,
}

fn phase_paths(config: &ScenarioConfig) -> Vec<PhasePaths> {
    let mut out = vec![PhasePaths { primary: config.primary_path.clone(), rho_sq: config.algorithm.rho_sq }];
    for c in &config.path_changes {
        let rho_sq = c.rho_sq.unwrap_or(out[out.len() - 1].rho_sq);
        out.push(PhasePaths { primary: c.primary_path.clone(), rho_sq });
    }
    out
}

fn variance(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n
}

fn disturbance(config: &ScenarioConfig, primary: &FirPath, x: &[f64]) -> Result<Vec<f64>> {
    let mut d = convolve(primary, x);
    if let Some(source) = &config.measurement_noise {
        for (d, v) in d.iter_mut().zip(generate(source, x.len())?) {
            *d += v;
        }
    }
    Ok(d)
}

/// Paths of one phase with its disturbance variance and statistics.
type PhaseModel = (PhasePaths, f64, CorrelationModel);

/// Correlation models for each primary path, from freshly generated signals
/// of the scenario's noise source. Filtering uses the controller's model ŝ.
fn phase_models(config: &ScenarioConfig) -> Result<(usize, Vec<PhaseModel>)> {
    let n = config.n_samples.clamp(10 * config.taps, ANALYSIS_SAMPLES.max(10 * config.taps));
    let x = generate(&config.noise, n)?;
    let mut out = Vec::new();
    for p in phase_paths(config) {
        let d = disturbance(config, &p.primary, &x)?;
        let model = build_correlation_model(&x, &d, &config.secondary_model, config.taps)?;
        let sigma_d_sq = variance(&d);
        out.push((p, sigma_d_sq, model));
    }
    Ok((n, out))
}

/// Step-size bounds, time constants and Wiener solutions per phase.
pub fn analyze(config: &ScenarioConfig) -> Result<AnalysisReport> {
    config.validate()?;
    let a = &config.algorithm;
    let (analysis_samples, models) = phase_models(config)?;
    let gain = config.secondary_model.power_gain();
    let mut phases = Vec::new();
    for (i, (paths, sigma_d_sq, model)) in models.iter().enumerate() {
        let varsigma_derived =
            if *sigma_d_sq == 0.0 { 0.0 } else { lagrangian_factor(gain, *sigma_d_sq, paths.rho_sq)? };
        let varsigma = match a.varsigma {
            Varsigma::Fixed(v) => v,
            Varsigma::Derived { sigma_d_sq: Some(s) } => lagrangian_factor(gain, s, paths.rho_sq)?,
            Varsigma::Derived { sigma_d_sq: None } => varsigma_derived,
        };
        let stability = stability_bounds(model, a.kappa, varsigma, a.mu1_initial)?;
        let wo = wiener_optimal(model)?.weights;
        let sub = wiener_suboptimal(model, varsigma, CrossCorrelation::Reference)?.weights;
        let sub_derived = wiener_suboptimal(model, varsigma_derived, CrossCorrelation::Reference)?.weights;
        phases.push(PhaseAnalysis {
            phase: i,
            rho_sq: paths.rho_sq,
            sigma_d_sq: *sigma_d_sq,
            varsigma,
            varsigma_derived,
            wiener_optimal_output_power: output_power(&wo, &model.r_x),
            wiener_optimal: wo,
            wiener_suboptimal: sub,
            wiener_suboptimal_derived_output_power: output_power(&sub_derived, &model.r_x),
            wiener_suboptimal_derived: sub_derived,
            unstable_configuration: !(stability.mu1_within_bound && stability.varsigma_mu1_within_bound),
            stability,
        });
    }
    Ok(AnalysisReport {
        config: config.clone(),
        analysis_samples,
        mu1_initial: a.mu1_initial,
        kappa: a.kappa,
        unstable_configuration: phases.iter().any(|p| p.unstable_configuration),
        phases,
    })
}

/// Constraint ellipses `wᵀR_x w = ρ²`, one per phase, for two-tap scenarios.
pub fn boundaries(config: &ScenarioConfig) -> Result<Vec<Vec<[f64; 2]>>> {
    if config.taps != 2 {
        return Ok(Vec::new());
    }
    let (_, models) = phase_models(config)?;
    models
        .iter()
        .map(|(p, _, m)| constraint_boundary(&m.r_x, p.rho_sq, BOUNDARY_POINTS).map_err(Error::from))
        .collect()
}

fn tail_std(records: &[TrajectoryRecord], start: usize) -> Vec<f64> {
    let phase: Vec<&TrajectoryRecord> = records.iter().filter(|r| r.sample_index >= start).collect();
    let skip = phase.len() - ((phase.len() as f64 * STEADY_STATE_FRACTION).ceil() as usize).min(phase.len());
    let tail = &phase[skip..];
    let width = tail.first().map_or(0, |r| r.weights.len());
    (0..width)
        .map(|k| variance(&tail.iter().map(|r| r.weights[k]).collect::<Vec<_>>()).sqrt())
        .collect()
}

fn band_db(num: f64, den: f64) -> f64 {
    10.0 * (num / den).log10()
}

/// Band powers of the error relative to the disturbance around `band`.
///
/// The out-of-band regions are `[0, 0.75·low]` and `[1.25·high, fs/2]`.
pub fn band_report(error: &Psd, disturbance: &Psd, band: (f64, f64), sample_rate: f64) -> BandReport {
    let low_band = (0.0, 0.75 * band.0);
    let high_band = (1.25 * band.1, sample_rate / 2.0);
    let change = |b: (f64, f64)| band_db(error.band_power(b.0, b.1), disturbance.band_power(b.0, b.1));
    BandReport {
        in_band: band,
        low_band,
        high_band,
        in_band_change_db: change(band),
        low_band_change_db: change(low_band),
        high_band_change_db: change(high_band),
    }
}

fn spectrum_tail(v: &[f64]) -> &[f64] {
    &v[v.len() - (v.len() as f64 * SPECTRUM_FRACTION) as usize..]
}

fn psd_of(signal: &[f64], sample_rate: f64) -> Result<Option<Psd>> {
    let tail = spectrum_tail(signal);
    if tail.len() < DEFAULT_SEGMENT {
        return Ok(None);
    }
    welch_psd(tail, sample_rate, DEFAULT_SEGMENT, DEFAULT_SEGMENT / 2).map(Some)
}

/// Run one algorithm of an experiment.
pub fn run_one(experiment: &Experiment, algorithm: Algorithm) -> Result<RunOutput> {
    Ok(run_scenario(&experiment.scenario_for(algorithm))?)
}

fn relative(dir: &Path, path: &Path) -> String {
    path.strip_prefix(dir).unwrap_or(path).display().to_string()
}

/// Run `algorithms` in parallel and write every output file into `dir`.
///
/// Writes `<stem>.trajectory.csv` and `<stem>.summary.json` per algorithm,
/// `<name>.comparison.json`, and where applicable `<name>.psd.csv` and
/// `<name>.boundary.csv` (`<name>.boundary2.csv`, ... for later phases).
pub fn run_experiment(experiment: &Experiment, algorithms: &[Algorithm], dir: &Path) -> Result<Comparison> {
    experiment.scenario.validate()?;
    if algorithms.is_empty() {
        return Err(Error::Config("no algorithms selected".into()));
    }
    std::fs::create_dir_all(dir).map_err(|e| Error::io("creating directory", dir, e))?;
    let name = experiment.scenario.name.clone();
    let outputs: Vec<(Algorithm, RunOutput)> = algorithms
        .par_iter()
        .map(|&alg| run_one(experiment, alg).map(|o| (alg, o)))
        .collect::<Result<_>>()?;

    let sample_rate = experiment.scenario.noise.sample_rate;
    let spectra = experiment.scenario.noise.kind == NoiseKind::BandLimited;
    let disturbance_psd = if spectra { psd_of(&outputs[0].1.signals.disturbance, sample_rate)? } else { None };
    let mut psd_table = disturbance_psd.as_ref().map(|p| PsdTable::new(p.frequencies.clone()));
    if let (Some(t), Some(p)) = (&mut psd_table, &disturbance_psd) {
        t.push("disturbance", p)?;
    }

    let mut reports = Vec::new();
    for (alg, out) in &outputs {
        let stem = experiment.stem(*alg);
        let trajectory_path = dir.join(format!("{stem}.trajectory.csv"));
        let summary_path = dir.join(format!("{stem}.summary.json"));
        let hash = write_trajectory(&trajectory_path, &out.trajectory)?;
        write_json(
            &summary_path,
            &SummaryFile {
                config: experiment.scenario_for(*alg),
                synthetic_paths: experiment.synthetic_paths,
                summary: out.summary.clone(),
                trajectory_sha256: hash,
            },
        )?;
        let mut bands = None;
        if let (Some(table), Some(dpsd)) = (&mut psd_table, &disturbance_psd) {
            // a diverged run leaves a short error record
            if out.signals.error.len() == out.signals.disturbance.len() {
                if let Some(epsd) = psd_of(&out.signals.error, sample_rate)? {
                    table.push(alg.name(), &epsd)?;
                    let band = experiment.scenario.noise.band.unwrap_or((0.0, sample_rate / 2.0));
                    bands = Some(band_report(&epsd, dpsd, band, sample_rate));
                }
            }
        }
        let s = &out.summary;
        let last_start = s.phases.last().map_or(0, |p| p.start);
        reports.push(AlgorithmReport {
            algorithm: *alg,
            status: s.status,
            samples_run: s.samples_run,
            final_weights: s.final_weights.clone(),
            steady_state_error_power: s.steady_state_error_power,
            steady_state_output_power: s.steady_state_output_power,
            convergence_sample: s.convergence_sample,
            convergence_resolution: s.convergence_resolution,
            exceeded_samples: s.exceeded_samples,
            violation_samples: s.violation_samples,
            varsigma: s.varsigma,
            phases: s.phases.clone(),
            steady_state_weight_std: tail_std(&out.trajectory, last_start),
            bands,
            trajectory_file: relative(dir, &trajectory_path),
            summary_file: relative(dir, &summary_path),
        });
    }

    let mut psd_file = None;
    if let Some(table) = &psd_table {
        let path = dir.join(format!("{name}.psd.csv"));
        write_psd(&path, table)?;
        psd_file = Some(relative(dir, &path));
    }
    let mut boundary_files = Vec::new();
    for (i, points) in boundaries(&experiment.scenario)?.iter().enumerate() {
        let suffix = if i == 0 { String::new() } else { (i + 1).to_string() };
        let path = dir.join(format!("{name}.boundary{suffix}.csv"));
        write_boundary(&path, points)?;
        boundary_files.push(relative(dir, &path));
    }
    let analysis = if experiment.scenario.taps <= ANALYSIS_MAX_TAPS {
        Some(analyze(&experiment.scenario)?)
    } else {
        None
    };
    let comparison = Comparison {
        preset: experiment.preset,
        config: experiment.scenario.clone(),
        synthetic_paths: experiment.synthetic_paths,
        reference_points: experiment.reference_points.clone(),
        algorithms: reports,
        psd_file,
        boundary_files,
        analysis,
    };
    write_json(&dir.join(format!("{name}.comparison.json")), &comparison)?;
    Ok(comparison)
}

/// Parameters accepted by [`sweep`].
pub const SWEEP_PARAMETERS: &[&str] = &["mu1_initial", "kappa", "gamma", "varsigma", "rho_sq"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub parameter: String,
    pub value: f64,
    pub algorithm: Algorithm,
    pub status: String,
    pub steady_state_error_power: f64,
    pub steady_state_output_power: f64,
    /// Convergence count of the last phase.
    pub convergence_samples: usize,
    pub convergence_sample: usize,
    pub violation_samples: usize,
    pub exceeded_samples: usize,
}

/// One run per `(value, algorithm)`, parallel across values.
pub fn sweep(
    experiment: &Experiment,
    parameter: &str,
    values: &[f64],
    algorithms: &[Algorithm],
) -> Result<Vec<SweepRow>> {
    if !SWEEP_PARAMETERS.contains(&parameter) {
        return Err(Error::Config(format!(
            "unknown sweep parameter `{parameter}` (expected one of: {})",
            SWEEP_PARAMETERS.join(", ")
        )));
    }
    if values.is_empty() || algorithms.is_empty() {
        return Err(Error::Config("sweep needs at least one value and one algorithm".into()));
    }
    let jobs: Vec<(f64, Algorithm)> =
        values.iter().flat_map(|&v| algorithms.iter().map(move |&a| (v, a))).collect();
    jobs.par_iter()
        .map(|&(value, alg)| {
            let mut scenario = experiment.scenario_for(alg);
            apply_override(&mut scenario, parameter, &value.to_string())?;
            let s = run_scenario(&scenario)?.summary;
            Ok(SweepRow {
                parameter: parameter.to_string(),
                value,
                algorithm: alg,
                status: match s.status {
                    RunStatus::Completed => "completed".into(),
                    RunStatus::Diverged { sample } => format!("diverged@{sample}"),
                },
                steady_state_error_power: s.steady_state_error_power,
                steady_state_output_power: s.steady_state_output_power,
                convergence_samples: s.phases.last().map_or(0, |p| p.convergence_samples),
                convergence_sample: s.convergence_sample,
                violation_samples: s.violation_samples,
                exceeded_samples: s.exceeded_samples,
            })
        })
        .collect()
}

pub fn write_sweep(path: &Path, rows: &[SweepRow]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io("creating directory", parent, e))?;
    }
    let file = std::fs::File::create(path).map_err(|e| Error::io("creating", path, e))?;
    let mut w = csv::Writer::from_writer(file);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Analysis(format!("writing {}: {e}", path.display())))?;
    }
    w.flush().map_err(|e| Error::io("writing", path, e))
}

pub fn read_sweep(path: &Path) -> Result<Vec<SweepRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::Format {
        kind: "sweep CSV",
        path: PathBuf::from(path),
        message: e.to_string(),
    })?;
    r.deserialize()
        .map(|row| {
            row.map_err(|e| Error::Format { kind: "sweep CSV", path: path.into(), message: e.to_string() })
        })
        .collect()
}
