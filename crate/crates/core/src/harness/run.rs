use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::{ScenarioConfig, SIGMA_D_PREAMBLE};
use crate::acoustics::{convolve, generate, saturate, DelayLine};
use crate::controllers::{
    lagrangian_factor, Algorithm, Branch, Controller, FilteredReferenceState, StepInput, Varsigma,
};
use crate::error::{config_err, Error, Result};
use crate::math::{distance, norm, variance};

/// Relative distance to the final weights that counts as converged.
pub const CONVERGENCE_TOLERANCE: f64 = 0.05;
/// Trailing fraction of a phase used for steady-state statistics.
pub const STEADY_STATE_FRACTION: f64 = 0.2;
/// Budget of stored weight values used for convergence detection.
const SNAPSHOT_BUDGET: usize = 4_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub sample_index: usize,
    /// Leading weights, at most `weight_cap` of them.
    pub weights: Vec<f64>,
    pub error: f64,
    /// Commanded control output, before clipping.
    pub output: f64,
    pub output_power_estimate: f64,
    pub step_size: f64,
    pub branch: Branch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "status")]
pub enum RunStatus {
    Completed,
    Diverged { sample: usize },
}

/// Statistics of the interval between two environment changes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSummary {
    pub start: usize,
    pub end: usize,
    pub final_weights: Vec<f64>,
    /// Samples from `start` until the weights stay within
    /// [`CONVERGENCE_TOLERANCE`] of `final_weights`.
    pub convergence_samples: usize,
    pub steady_state_error_power: f64,
    pub steady_state_output_power: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub scenario: String,
    pub algorithm: Algorithm,
    pub status: RunStatus,
    pub samples_run: usize,
    pub final_weights: Vec<f64>,
    pub steady_state_error_power: f64,
    pub steady_state_output_power: f64,
    /// First sample after which the weights stay within
    /// [`CONVERGENCE_TOLERANCE`] of the final weights.
    pub convergence_sample: usize,
    /// Granularity of the convergence sample count.
    pub convergence_resolution: usize,
    pub exceeded_samples: usize,
    /// Samples with `Ê[y²] > ρ²`, whatever the algorithm did about it.
    pub violation_samples: usize,
    pub varsigma: f64,
    pub sigma_d_sq: Option<f64>,
    pub phases: Vec<PhaseSummary>,
}

/// Full-rate signals of a run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Signals {
    pub reference: Vec<f64>,
    pub disturbance: Vec<f64>,
    pub error: Vec<f64>,
    /// Commanded control output, before clipping.
    pub output: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub trajectory: Vec<TrajectoryRecord>,
    pub summary: RunSummary,
    pub signals: Signals,
}

fn resolve_varsigma(
    config: &ScenarioConfig,
    reference: &[f64],
    sensor: &[f64],
) -> Result<(f64, Option<f64>)> {
    match config.algorithm.varsigma {
        Varsigma::Fixed(v) => Ok((v, None)),
        Varsigma::Derived { sigma_d_sq } => {
            let sigma = match sigma_d_sq {
                Some(s) => s,
                None => {
                    let n = reference.len().min(SIGMA_D_PREAMBLE);
                    let mut d = convolve(&config.primary_path, &reference[..n]);
                    for (d, v) in d.iter_mut().zip(sensor) {
                        *d += v;
                    }
                    variance(&d)
                }
            };
            let gain = config.secondary_model.power_gain();
            if sigma == 0.0 {
                return Ok((0.0, Some(0.0)));
            }
            Ok((lagrangian_factor(gain, sigma, config.algorithm.rho_sq)?, Some(sigma)))
        }
    }
}

struct Snapshots {
    stride: usize,
    indices: Vec<usize>,
    weights: Vec<Vec<f64>>,
}

impl Snapshots {
    fn new(n_samples: usize, taps: usize) -> Self {
        let stride = (n_samples.saturating_mul(taps)).div_ceil(SNAPSHOT_BUDGET).max(1);
        Self { stride, indices: Vec::new(), weights: Vec::new() }
    }

    fn push(&mut self, index: usize, w: &[f64]) {
        self.indices.push(index);
        self.weights.push(w.to_vec());
    }

    /// First snapshot index in `[start, end)` after which all snapshots stay
    /// within tolerance of `target`.
    fn converged_at(&self, start: usize, end: usize, target: &[f64]) -> usize {
        let tol = CONVERGENCE_TOLERANCE * norm(target);
        let mut converged = start;
        for (i, w) in self.indices.iter().zip(&self.weights) {
            if *i < start || *i >= end {
                continue;
            }
            if distance(w, target) > tol {
                converged = i + self.stride;
            }
        }
        converged.min(end)
    }
}

fn tail_power(v: &[f64]) -> f64 {
    let n = v.len();
    let skip = n - (libm::ceil(n as f64 * STEADY_STATE_FRACTION) as usize).min(n);
    let tail = &v[skip..];
    if tail.is_empty() {
        0.0
    } else {
        tail.iter().map(|x| x * x).sum::<f64>() / tail.len() as f64
    }
}

/// Run the sample loop for `config`.
///
/// Per sample: `d = p * x`, `y = wᵀx`, optional clipping, `e = d - s * y`,
/// `x' = ŝ * x`, one controller update, then recording. Environment changes
/// take effect before the sample they are scheduled at. A non-finite update
/// ends the run early with [`RunStatus::Diverged`] and a partial trajectory.
pub fn run_scenario(config: &ScenarioConfig) -> Result<RunOutput> {
    config.validate()?;
    let n = config.n_samples;
    let reference = generate(&config.noise, n)?;
    let sensor = match &config.measurement_noise {
        Some(source) => generate(source, n)?,
        None => Vec::new(),
    };
    let (varsigma, sigma_d_sq) = resolve_varsigma(config, &reference, &sensor)?;

    let mut controller = Controller::new(config.algorithm.clone(), config.taps, varsigma)?;
    if let Some(w) = &config.initial_weights {
        controller = controller.with_weights(w)?;
    }

    let primary_len = config
        .path_changes
        .iter()
        .map(|c| c.primary_path.len())
        .chain([config.primary_path.len()])
        .max()
        .unwrap_or(1);
    let secondary_len = config
        .path_changes
        .iter()
        .map(|c| c.secondary_path.len())
        .chain([config.secondary_path.len()])
        .max()
        .unwrap_or(1);
    let mut primary = config.primary_path.clone();
    let mut secondary = config.secondary_path.clone();
    let mut x_line = DelayLine::new(primary_len);
    let mut y_line = DelayLine::new(secondary_len);
    let mut filtered = FilteredReferenceState::new(config.secondary_model.clone(), config.taps);

    let mut signals = Signals {
        reference: Vec::with_capacity(n),
        disturbance: Vec::with_capacity(n),
        error: Vec::with_capacity(n),
        output: Vec::with_capacity(n),
    };
    let mut trajectory = Vec::with_capacity(n / config.record_stride + 1);
    let mut snapshots = Snapshots::new(n, config.taps);
    let mut phase_bounds: Vec<usize> = Vec::new();
    phase_bounds.push(0);
    let mut phase_finals: Vec<Vec<f64>> = Vec::new();
    let mut changes = config.path_changes.iter().peekable();
    let mut exceeded_samples = 0;
    let mut violation_samples = 0;
    let mut status = RunStatus::Completed;
    let cap = config.weight_cap.min(config.taps);

    for (i, &x) in reference.iter().enumerate() {
        if let Some(change) = changes.next_if(|c| c.at == i) {
            phase_finals.push(controller.weights().to_vec());
            phase_bounds.push(i);
            primary = change.primary_path.clone();
            secondary = change.secondary_path.clone();
            if let Some(r) = change.rho_sq {
                controller.set_rho_sq(r)?;
            }
        }
        x_line.push(x);
        let d = primary.apply(x_line.as_slice()) + sensor.get(i).copied().unwrap_or(0.0);
        filtered.push(x)?;
        let y = controller.output(filtered.reference());
        let y_out = match &config.saturation {
            Some(m) => saturate(y, m),
            None => y,
        };
        y_line.push(y_out);
        let e = d - secondary.apply(y_line.as_slice());

        signals.reference.push(x);
        signals.disturbance.push(d);
        signals.error.push(e);
        signals.output.push(y);

        let input = StepInput {
            reference: filtered.reference(),
            filtered_reference: filtered.filtered(),
            output: y,
            error: e,
        };
        let branch = match controller.step(&input) {
            Ok(b) => b,
            Err(Error::Diverged { sample }) => {
                status = RunStatus::Diverged { sample };
                break;
            }
            Err(other) => return Err(other),
        };
        let state = controller.state();
        if branch == Branch::Exceeded {
            exceeded_samples += 1;
        }
        // rescaling resets its estimate to ρ² on violation, so count that too
        if state.output_power_estimate > controller.config().rho_sq || branch == Branch::Exceeded {
            violation_samples += 1;
        }
        if i % snapshots.stride == 0 {
            snapshots.push(i, &state.weights);
        }
        if i % config.record_stride == 0 || i + 1 == n {
            trajectory.push(TrajectoryRecord {
                sample_index: i,
                weights: state.weights[..cap].to_vec(),
                error: e,
                output: y,
                output_power_estimate: state.output_power_estimate,
                step_size: state.step_size,
                branch,
            });
        }
    }

    let samples_run = signals.error.len();
    let final_weights = controller.weights().to_vec();
    phase_finals.push(final_weights.clone());
    phase_bounds.push(samples_run);
    snapshots.push(samples_run.saturating_sub(1), &final_weights);

    let phases: Vec<PhaseSummary> = phase_bounds
        .windows(2)
        .zip(&phase_finals)
        .map(|(w, fin)| {
            let (start, end) = (w[0], w[1].max(w[0]));
            PhaseSummary {
                start,
                end,
                final_weights: fin.clone(),
                convergence_samples: snapshots.converged_at(start, end, fin) - start,
                steady_state_error_power: tail_power(&signals.error[start..end]),
                steady_state_output_power: tail_power(&signals.output[start..end]),
            }
        })
        .collect();

    let summary = RunSummary {
        scenario: config.name.clone(),
        algorithm: config.algorithm.algorithm,
        status,
        samples_run,
        steady_state_error_power: tail_power(&signals.error),
        steady_state_output_power: tail_power(&signals.output),
        convergence_sample: snapshots.converged_at(0, samples_run, &final_weights),
        convergence_resolution: snapshots.stride,
        final_weights,
        exceeded_samples,
        violation_samples,
        varsigma,
        sigma_d_sq,
        phases,
    };
    Ok(RunOutput { trajectory, summary, signals })
}

/// [`run_scenario`] for a schedule with exactly one environment change; the
/// summary then carries two phases.
pub fn run_varying_environment(config: &ScenarioConfig) -> Result<RunOutput> {
    if config.path_changes.len() != 1 {
        return Err(config_err("varying-environment runs need exactly one path change"));
    }
    run_scenario(config)
}
