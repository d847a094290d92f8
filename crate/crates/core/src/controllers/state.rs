use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

/// Which update direction ran on a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// `Ê[y²] <= ρ²`: error-gradient update.
    Within,
    /// `Ê[y²] > ρ²`: output-power descent.
    Exceeded,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Within => "within",
            Branch::Exceeded => "exceeded",
        }
    }
}

/// Mutable state of a control filter.
#[derive(Debug, Clone, PartialEq)]
pub struct ControllerState {
    pub weights: Vec<f64>,
    pub momentum: Vec<f64>,
    /// Current μ₁(n).
    pub step_size: f64,
    /// Running estimate of `E[y²(n)]`.
    pub output_power_estimate: f64,
}

impl ControllerState {
    pub fn new(taps: usize, step_size: f64) -> Self {
        Self {
            weights: vec![0.0; taps],
            momentum: vec![0.0; taps],
            step_size,
            output_power_estimate: 0.0,
        }
    }

    pub fn taps(&self) -> usize {
        self.weights.len()
    }

    pub fn is_finite(&self) -> bool {
        self.weights.iter().chain(&self.momentum).all(|v| v.is_finite())
            && self.step_size.is_finite()
            && self.output_power_estimate.is_finite()
    }
}

/// Exponentially smoothed output power: `α·previous + (1-α)·y²`.
#[inline]
pub fn estimate_output_power(previous: f64, y: f64, alpha: f64) -> f64 {
    alpha * previous + (1.0 - alpha) * y * y
}
