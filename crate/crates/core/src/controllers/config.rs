use serde::{Deserialize, Serialize};

use crate::error::{config_err, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "fxlms")]
    Fxlms,
    #[serde(rename = "rescaling")]
    Rescaling,
    #[serde(rename = "2gd")]
    TwoGradient,
    #[serde(rename = "2gd-momentum-vss")]
    TwoGradientMomentum,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Fxlms,
        Algorithm::Rescaling,
        Algorithm::TwoGradient,
        Algorithm::TwoGradientMomentum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Fxlms => "fxlms",
            Algorithm::Rescaling => "rescaling",
            Algorithm::TwoGradient => "2gd",
            Algorithm::TwoGradientMomentum => "2gd-momentum-vss",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == name)
    }

    /// Whether the algorithm reacts to the output-power constraint.
    pub fn is_constrained(self) -> bool {
        !matches!(self, Algorithm::Fxlms)
    }
}

/// Source of the Lagrangian factor ς.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Varsigma {
    Fixed(f64),
    /// Computed from the secondary-path model gain and the disturbance power.
    /// `sigma_d_sq` overrides the power measured from the run preamble.
    Derived { sigma_d_sq: Option<f64> },
}

/// How the step-size decay is bounded on constraint violation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepFloor {
    /// `max(γμ₁, μ_min)`: μ_min is a floor.
    #[default]
    Floor,
    /// `min(γμ₁, μ_min)` exactly as printed; decays without bound.
    LiteralMin,
}

/// How `E[y²(n)]` is estimated.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PowerEstimator {
    /// `Ê ← αÊ + (1-α)y²` with `α = power_smoothing`.
    #[default]
    Smoothed,
    /// `Ê = wᵀ R̂_x w`, with `R̂_x` a bias-corrected running Toeplitz
    /// estimate of the reference autocorrelation (forgetting factor
    /// `reference_smoothing`). Costs `O(L_f²)` per sample.
    Projected { reference_smoothing: f64 },
}

/// What happens to the momentum accumulator when the power branch runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MomentumOnSwitch {
    #[default]
    Reset,
    Freeze,
    /// Multiply by κ.
    Decay,
    /// Keep accumulating: `ζ ← κζ − ς μ₁ y x`, `w ← w + ζ`.
    Accumulate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmConfig {
    pub algorithm: Algorithm,
    pub mu1_initial: f64,
    pub mu_min: f64,
    pub gamma: f64,
    pub kappa: f64,
    pub rho_sq: f64,
    pub varsigma: Varsigma,
    #[serde(default = "default_smoothing")]
    pub power_smoothing: f64,
    #[serde(default)]
    pub power_estimator: PowerEstimator,
    #[serde(default)]
    pub step_floor: StepFloor,
    #[serde(default)]
    pub momentum_on_switch: MomentumOnSwitch,
}

fn default_smoothing() -> f64 {
    0.99
}

impl AlgorithmConfig {
    /// Default tuning: μ₁(0)=1e-5, μ_min=1e-6,
    /// ς=0.85, γ=0.9, κ=0.99, α=0.99.
    pub fn recommended(algorithm: Algorithm, rho_sq: f64) -> Self {
        Self {
            algorithm,
            mu1_initial: 1e-5,
            mu_min: 1e-6,
            gamma: 0.9,
            kappa: 0.99,
            rho_sq,
            varsigma: Varsigma::Fixed(0.85),
            power_smoothing: 0.99,
            power_estimator: PowerEstimator::Smoothed,
            step_floor: StepFloor::Floor,
            momentum_on_switch: MomentumOnSwitch::Reset,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.mu1_initial,
            self.mu_min,
            self.gamma,
            self.kappa,
            self.rho_sq,
            self.power_smoothing,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(config_err("algorithm parameters must be finite"));
        }
        if self.mu1_initial < 0.0 {
            return Err(config_err("mu1_initial must be >= 0"));
        }
        if self.mu_min < 0.0 || self.mu_min > self.mu1_initial {
            return Err(config_err("mu_min must satisfy 0 <= mu_min <= mu1_initial"));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(config_err("gamma must satisfy 0 < gamma < 1"));
        }
        if self.kappa.abs() >= 1.0 {
            return Err(config_err("kappa must satisfy |kappa| < 1"));
        }
        if self.rho_sq <= 0.0 {
            return Err(config_err("rho_sq must be > 0"));
        }
        if !(self.power_smoothing > 0.0 && self.power_smoothing < 1.0) {
            return Err(config_err("power_smoothing must satisfy 0 < alpha < 1"));
        }
        if let PowerEstimator::Projected { reference_smoothing: a } = self.power_estimator {
            if !(a > 0.0 && a <= 1.0) {
                return Err(config_err("reference_smoothing must satisfy 0 < alpha <= 1"));
            }
        }
        match self.varsigma {
            Varsigma::Fixed(v) if !(v.is_finite() && v >= 0.0) => {
                Err(config_err("fixed varsigma must be finite and >= 0"))
            }
            Varsigma::Derived { sigma_d_sq: Some(s) } if !(s.is_finite() && s > 0.0) => {
                Err(config_err("sigma_d_sq override must be > 0"))
            }
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        for a in Algorithm::ALL {
            AlgorithmConfig::recommended(a, 1.0).validate().unwrap();
        }
    }

    #[test]
    fn invariants_enforced() {
        let base = AlgorithmConfig::recommended(Algorithm::TwoGradient, 1.0);
        let cases = [
            AlgorithmConfig { rho_sq: -1.0, ..base.clone() },
            AlgorithmConfig { gamma: 1.0, ..base.clone() },
            AlgorithmConfig { kappa: 1.0, ..base.clone() },
            AlgorithmConfig { mu_min: 1.0, ..base.clone() },
            AlgorithmConfig { power_smoothing: 0.0, ..base.clone() },
            AlgorithmConfig { varsigma: Varsigma::Fixed(-0.1), ..base.clone() },
        ];
        for c in cases {
            assert!(c.validate().is_err(), "{c:?}");
        }
    }

    #[test]
    fn names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(Algorithm::from_name(a.name()), Some(a));
        }
        assert_eq!(Algorithm::from_name("nlms"), None);
    }
}
