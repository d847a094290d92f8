use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::acoustics::{FirPath, NoiseSource, SaturationModel};
use crate::controllers::AlgorithmConfig;
use crate::error::{config_err, Result};

/// Samples of disturbance used to measure `σ_d²` for a derived ς.
pub const SIGMA_D_PREAMBLE: usize = 4096;

/// Environment change applied just before sample `at`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathChange {
    pub at: usize,
    pub primary_path: FirPath,
    pub secondary_path: FirPath,
    /// New output power limit, when the change also moves the constraint.
    #[serde(default)]
    pub rho_sq: Option<f64>,
}

/// Complete description of one simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: String,
    pub noise: NoiseSource,
    pub primary_path: FirPath,
    pub secondary_path: FirPath,
    /// ŝ used to filter the reference; may differ from `secondary_path`.
    pub secondary_model: FirPath,
    /// Control filter length L_f.
    pub taps: usize,
    pub algorithm: AlgorithmConfig,
    #[serde(default)]
    pub saturation: Option<SaturationModel>,
    pub n_samples: usize,
    #[serde(default)]
    pub path_changes: Vec<PathChange>,
    pub record_stride: usize,
    /// Number of leading weights stored per trajectory record.
    #[serde(default = "default_weight_cap")]
    pub weight_cap: usize,
    #[serde(default)]
    pub initial_weights: Option<Vec<f64>>,
    /// Uncorrelated noise added to the disturbance at the error sensor.
    #[serde(default)]
    pub measurement_noise: Option<NoiseSource>,
}

fn default_weight_cap() -> usize {
    8
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        self.noise.validate()?;
        if let Some(v) = &self.measurement_noise {
            v.validate()?;
        }
        self.algorithm.validate()?;
        if let Some(s) = &self.saturation {
            s.validate()?;
        }
        if self.taps == 0 {
            return Err(config_err("taps must be >= 1"));
        }
        if self.n_samples == 0 {
            return Err(config_err("n_samples must be >= 1"));
        }
        if self.record_stride == 0 {
            return Err(config_err("record_stride must be >= 1"));
        }
        let mut last = None;
        for change in &self.path_changes {
            if change.at >= self.n_samples {
                return Err(config_err("path change index must be < n_samples"));
            }
            if last.is_some_and(|l| change.at <= l) {
                return Err(config_err("path change indices must be strictly increasing"));
            }
            if let Some(r) = change.rho_sq {
                if !(r.is_finite() && r > 0.0) {
                    return Err(config_err("rho_sq must be > 0"));
                }
            }
            last = Some(change.at);
        }
        if let Some(w) = &self.initial_weights {
            if w.len() != self.taps || w.iter().any(|v| !v.is_finite()) {
                return Err(config_err("initial_weights must have `taps` finite entries"));
            }
        }
        Ok(())
    }
}
