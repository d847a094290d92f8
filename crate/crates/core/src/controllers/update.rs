use crate::error::{config_err, Error, Result};

use alloc::vec;
use alloc::vec::Vec;

use super::{
    estimate_output_power, PowerEstimator, Algorithm, AlgorithmConfig, Branch, ControllerState,
    MomentumOnSwitch, StepFloor,
};

/// Signals available to the controller at sample `n`.
#[derive(Debug, Clone, Copy)]
pub struct StepInput<'a> {
    /// Reference vector `x(n)`.
    pub reference: &'a [f64],
    /// Filtered reference vector `x'(n)`.
    pub filtered_reference: &'a [f64],
    /// Control output `y(n) = wᵀx(n)` before any clipping.
    pub output: f64,
    /// Residual `e(n)` at the error microphone.
    pub error: f64,
}

fn check_input(state: &ControllerState, input: &StepInput<'_>) -> Result<()> {
    let n = state.taps();
    if input.reference.len() != n || input.filtered_reference.len() != n {
        return Err(Error::Data(alloc::format!(
            "reference vectors must have {n} taps (got {} and {})",
            input.reference.len(),
            input.filtered_reference.len()
        )));
    }
    Ok(())
}

// The sample index is filled in by `Controller::step`.
fn diverged() -> Error {
    Error::Diverged { sample: 0 }
}

fn finish(state: &ControllerState, branch: Branch) -> Result<Branch> {
    if state.is_finite() {
        Ok(branch)
    } else {
        Err(diverged())
    }
}

#[inline]
fn error_gradient_step(weights: &mut [f64], mu: f64, e: f64, xprime: &[f64]) {
    let g = mu * e;
    weights.iter_mut().zip(xprime).for_each(|(w, x)| *w += g * x);
}

#[inline]
fn power_gradient_step(weights: &mut [f64], mu2: f64, y: f64, x: &[f64]) {
    let g = mu2 * y;
    weights.iter_mut().zip(x).for_each(|(w, x)| *w -= g * x);
}

fn decay_step(state: &mut ControllerState, config: &AlgorithmConfig) {
    let next = config.gamma * state.step_size;
    state.step_size = match config.step_floor {
        StepFloor::Floor => next.max(config.mu_min),
        StepFloor::LiteralMin => next.min(config.mu_min),
    };
}

fn power_branch(state: &mut ControllerState, config: &AlgorithmConfig, varsigma: f64, input: &StepInput<'_>) {
    let mu2 = varsigma * state.step_size;
    power_gradient_step(&mut state.weights, mu2, input.output, input.reference);
    decay_step(state, config);
}

fn exceeded(state: &ControllerState, config: &AlgorithmConfig) -> bool {
    state.output_power_estimate > config.rho_sq
}

/// `w ← w + μ₁ e x'`. Step size and momentum are left untouched.
pub fn step_fxlms(state: &mut ControllerState, input: &StepInput<'_>) -> Result<Branch> {
    check_input(state, input)?;
    if !input.error.is_finite() {
        return Err(diverged());
    }
    error_gradient_step(&mut state.weights, state.step_size, input.error, input.filtered_reference);
    finish(state, Branch::Within)
}

/// Two-gradient-direction update with variable step size.
///
/// The lower branch descends `y²` along the unfiltered reference `x(n)` with
/// step `ς μ₁(n)`, then decays μ₁.
pub fn step_2gd(
    state: &mut ControllerState,
    config: &AlgorithmConfig,
    varsigma: f64,
    input: &StepInput<'_>,
) -> Result<Branch> {
    check_input(state, input)?;
    if !(input.error.is_finite() && input.output.is_finite()) {
        return Err(diverged());
    }
    if exceeded(state, config) {
        power_branch(state, config, varsigma, input);
        finish(state, Branch::Exceeded)
    } else {
        error_gradient_step(&mut state.weights, state.step_size, input.error, input.filtered_reference);
        finish(state, Branch::Within)
    }
}

/// Momentum two-gradient-direction update with variable step size.
///
/// Within the constraint: `ζ ← κζ + μ₁ e x'`, `w ← w + ζ`. Otherwise the
/// [`step_2gd`] power branch runs and the accumulator is handled according
/// to [`MomentumOnSwitch`].
pub fn step_2gd_momentum(
    state: &mut ControllerState,
    config: &AlgorithmConfig,
    varsigma: f64,
    input: &StepInput<'_>,
) -> Result<Branch> {
    check_input(state, input)?;
    if !(input.error.is_finite() && input.output.is_finite()) {
        return Err(diverged());
    }
    if exceeded(state, config) {
        if config.momentum_on_switch == MomentumOnSwitch::Accumulate {
            let g = varsigma * state.step_size * input.output;
            let kappa = config.kappa;
            for ((w, z), x) in state.weights.iter_mut().zip(state.momentum.iter_mut()).zip(input.reference) {
                *z = kappa * *z - g * x;
                *w += *z;
            }
            decay_step(state, config);
            return finish(state, Branch::Exceeded);
        }
        power_branch(state, config, varsigma, input);
        match config.momentum_on_switch {
            MomentumOnSwitch::Reset => state.momentum.iter_mut().for_each(|z| *z = 0.0),
            MomentumOnSwitch::Freeze => {}
            MomentumOnSwitch::Decay => state.momentum.iter_mut().for_each(|z| *z *= config.kappa),
            MomentumOnSwitch::Accumulate => unreachable!(),
        }
        finish(state, Branch::Exceeded)
    } else {
        let g = state.step_size * input.error;
        let kappa = config.kappa;
        for ((w, z), x) in state
            .weights
            .iter_mut()
            .zip(state.momentum.iter_mut())
            .zip(input.filtered_reference)
        {
            *z = kappa * *z + g * x;
            *w += *z;
        }
        finish(state, Branch::Within)
    }
}

/// FXLMS followed by weight rescaling when the output power limit is exceeded.
///
/// The weights are scaled by `√(ρ²/Ê[y²])`, after which the power estimate is
/// set to `ρ²`, the power the rescaled filter would have produced.
pub fn step_rescaling(
    state: &mut ControllerState,
    config: &AlgorithmConfig,
    input: &StepInput<'_>,
) -> Result<Branch> {
    step_fxlms(state, input)?;
    if exceeded(state, config) {
        let scale = libm::sqrt(config.rho_sq / state.output_power_estimate);
        state.weights.iter_mut().for_each(|w| *w *= scale);
        state.output_power_estimate = config.rho_sq;
        finish(state, Branch::Exceeded)
    } else {
        Ok(Branch::Within)
    }
}

/// A configured controller: algorithm parameters, resolved ς and state.
#[derive(Debug, Clone)]
pub struct Controller {
    config: AlgorithmConfig,
    varsigma: f64,
    state: ControllerState,
    samples: usize,
    /// Running lag products `x(n)x(n-k)` for the projected estimator.
    lags: Vec<f64>,
    lag_weight: f64,
}

impl Controller {
    /// `varsigma` is the resolved Lagrangian factor used by the power branch.
    pub fn new(config: AlgorithmConfig, taps: usize, varsigma: f64) -> Result<Self> {
        config.validate()?;
        if taps == 0 {
            return Err(config_err("control filter needs at least one tap"));
        }
        if !(varsigma.is_finite() && varsigma >= 0.0) {
            return Err(config_err("varsigma must be finite and >= 0"));
        }
        let state = ControllerState::new(taps, config.mu1_initial);
        Ok(Self { config, varsigma, state, samples: 0, lags: vec![0.0; taps], lag_weight: 0.0 })
    }

    pub fn with_weights(mut self, weights: &[f64]) -> Result<Self> {
        if weights.len() != self.state.taps() {
            return Err(config_err("initial weight count does not match taps"));
        }
        self.state.weights.copy_from_slice(weights);
        Ok(self)
    }

    pub fn config(&self) -> &AlgorithmConfig {
        &self.config
    }

    pub fn varsigma(&self) -> f64 {
        self.varsigma
    }

    pub fn state(&self) -> &ControllerState {
        &self.state
    }

    pub fn weights(&self) -> &[f64] {
        &self.state.weights
    }

    /// Replace the power limit, e.g. after an environment change.
    pub fn set_rho_sq(&mut self, rho_sq: f64) -> Result<()> {
        if !(rho_sq.is_finite() && rho_sq > 0.0) {
            return Err(config_err("rho_sq must be > 0"));
        }
        self.config.rho_sq = rho_sq;
        Ok(())
    }

    /// `y(n) = wᵀx(n)`.
    #[inline]
    pub fn output(&self, reference: &[f64]) -> f64 {
        crate::math::dot(&self.state.weights, reference)
    }

    fn projected_power(&mut self, x: &[f64], alpha: f64) -> f64 {
        let x0 = x.first().copied().unwrap_or(0.0);
        // forgetting factor 1 means an ever-growing average
        let alpha = if alpha >= 1.0 { 1.0 - 1.0 / self.samples as f64 } else { alpha };
        for (r, xk) in self.lags.iter_mut().zip(x) {
            *r = alpha * *r + (1.0 - alpha) * x0 * xk;
        }
        self.lag_weight = alpha * self.lag_weight + (1.0 - alpha);
        let w = &self.state.weights;
        let mut p = 0.0;
        for (k, r) in self.lags.iter().enumerate() {
            let c: f64 = w[k..].iter().zip(w).map(|(a, b)| a * b).sum();
            p += if k == 0 { r * c } else { 2.0 * r * c };
        }
        (p / self.lag_weight).max(0.0)
    }

    /// Update the power estimate with `input.output`, then run one update.
    pub fn step(&mut self, input: &StepInput<'_>) -> Result<Branch> {
        let n = self.samples;
        self.samples += 1;
        self.state.output_power_estimate = match self.config.power_estimator {
            PowerEstimator::Smoothed => estimate_output_power(
                self.state.output_power_estimate,
                input.output,
                self.config.power_smoothing,
            ),
            PowerEstimator::Projected { reference_smoothing } => {
                self.projected_power(input.reference, reference_smoothing)
            }
        };
        let result = match self.config.algorithm {
            Algorithm::Fxlms => step_fxlms(&mut self.state, input),
            Algorithm::Rescaling => step_rescaling(&mut self.state, &self.config, input),
            Algorithm::TwoGradient => step_2gd(&mut self.state, &self.config, self.varsigma, input),
            Algorithm::TwoGradientMomentum => {
                step_2gd_momentum(&mut self.state, &self.config, self.varsigma, input)
            }
        };
        result.map_err(|e| match e {
            Error::Diverged { .. } => Error::Diverged { sample: n },
            other => other,
        })
    }
}
