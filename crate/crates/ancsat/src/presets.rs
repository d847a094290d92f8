//! Named experiment presets and `key=value` overrides.

use std::fmt;
use std::str::FromStr;

use ancsat_core::acoustics::{ClipMode, FirPath, NoiseSource, SaturationModel};
use ancsat_core::controllers::{
    Algorithm, AlgorithmConfig, MomentumOnSwitch, PowerEstimator, StepFloor, Varsigma,
};
use ancsat_core::harness::{PathChange, ScenarioConfig};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Optimal-weight point of the two-weight plant.
pub const STATIC_OPTIMUM: [f64; 2] = [1.76, 1.25];
/// Constrained sub-optimum reported for the two-weight plant.
pub const STATIC_SUBOPTIMUM: [f64; 2] = [0.89, 0.66];
/// Constrained sub-optimum after the environment change.
pub const VARYING_SUBOPTIMUM: [f64; 2] = [1.63, 1.17];
/// Primary path after the change, as a multiple of the new sub-optimum: with
/// identity paths and ς = 0.85 the sub-optimum is `p / (1 + ς)`.
pub const VARYING_PRIMARY_GAIN: f64 = 1.85;

pub const SAMPLE_RATE: f64 = 16_000.0;
pub const NOISE_BAND: (f64, f64) = (200.0, 800.0);
/// Error-sensor noise floor of the saturation preset.
pub const SENSOR_NOISE_VARIANCE: f64 = 1e-3;

/// Seed of the sensor noise, derived from the primary-noise seed.
pub fn sensor_seed(seed: u64) -> u64 {
    seed ^ 0x5EED_5EED
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PresetName {
    Fig2Saturation,
    Fig3Static,
    Fig5Varying,
    Custom,
}

impl PresetName {
    pub const ALL: [PresetName; 4] =
        [PresetName::Fig2Saturation, PresetName::Fig3Static, PresetName::Fig5Varying, PresetName::Custom];

    pub fn as_str(self) -> &'static str {
        match self {
            PresetName::Fig2Saturation => "fig2-saturation",
            PresetName::Fig3Static => "fig3-static",
            PresetName::Fig5Varying => "fig5-varying",
            PresetName::Custom => "custom",
        }
    }
}

impl fmt::Display for PresetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PresetName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown preset `{s}`")))
    }
}

/// A scenario plus the information needed to interpret its results.
///
/// `scenario.algorithm.algorithm` is a placeholder; [`Experiment::scenario_for`]
/// substitutes each algorithm in turn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Experiment {
    pub preset: PresetName,
    pub scenario: ScenarioConfig,
    /// Paths are seeded random responses rather than measurements.
    pub synthetic_paths: bool,
    /// Reported constrained sub-optimum per phase, when known.
    #[serde(default)]
    pub reference_points: Vec<[f64; 2]>,
}

impl Experiment {
    pub fn scenario_for(&self, algorithm: Algorithm) -> ScenarioConfig {
        let mut s = self.scenario.clone();
        s.algorithm.algorithm = algorithm;
        s
    }

    pub fn apply_overrides<S: AsRef<str>>(&mut self, overrides: &[S]) -> Result<()> {
        for o in overrides {
            let (key, value) = o
                .as_ref()
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("override `{}` is not key=value", o.as_ref())))?;
            apply_override(&mut self.scenario, key.trim(), value.trim())?;
        }
        self.scenario.validate()?;
        Ok(())
    }

    /// Deterministic file-name stem for one algorithm's outputs.
    pub fn stem(&self, algorithm: Algorithm) -> String {
        format!("{}_{}", self.scenario.name, algorithm.name())
    }
}

fn two_weight_algorithm(rho_sq: f64) -> AlgorithmConfig {
    let mut a = AlgorithmConfig::recommended(Algorithm::Fxlms, rho_sq);
    a.power_estimator = PowerEstimator::Projected { reference_smoothing: 0.9999 };
    a
}

fn power(w: [f64; 2]) -> f64 {
    w[0] * w[0] + w[1] * w[1]
}

/// Two-weight static plant: unit white noise, identity secondary path, and
/// a limit equal to the power of the reported sub-optimum.
pub fn fig3_static(seed: u64) -> Experiment {
    let rho_sq = power(STATIC_SUBOPTIMUM);
    Experiment {
        preset: PresetName::Fig3Static,
        scenario: ScenarioConfig {
            name: "fig3-static".into(),
            noise: NoiseSource::white(1.0, SAMPLE_RATE, seed),
            primary_path: FirPath::new(STATIC_OPTIMUM.to_vec()).expect("finite"),
            secondary_path: FirPath::identity(),
            secondary_model: FirPath::identity(),
            taps: 2,
            algorithm: two_weight_algorithm(rho_sq),
            saturation: None,
            n_samples: 1_000_000,
            path_changes: Vec::new(),
            record_stride: 50,
            weight_cap: 8,
            initial_weights: None,
            measurement_noise: None,
        },
        synthetic_paths: false,
        reference_points: vec![STATIC_SUBOPTIMUM],
    }
}

/// The static plant with a stronger primary path from half-way through and
/// the limit raised to the power of the new sub-optimum.
pub fn fig5_varying(seed: u64) -> Experiment {
    let mut e = fig3_static(seed);
    e.preset = PresetName::Fig5Varying;
    e.scenario.name = "fig5-varying".into();
    let primary = VARYING_SUBOPTIMUM.iter().map(|w| w * VARYING_PRIMARY_GAIN).collect();
    e.scenario.path_changes.push(PathChange {
        at: e.scenario.n_samples / 2,
        primary_path: FirPath::new(primary).expect("finite"),
        secondary_path: FirPath::identity(),
        rho_sq: Some(power(VARYING_SUBOPTIMUM)),
    });
    e.reference_points.push(VARYING_SUBOPTIMUM);
    e
}

/// Broadband 200–800 Hz noise through seeded 64-tap paths with a clipping
/// loudspeaker and a 512-tap controller.
pub fn fig2_saturation(seed: u64) -> Experiment {
    let primary = FirPath::synthetic(64, 24, 8.0, 1.0, 1001).expect("valid synthetic path");
    let secondary = FirPath::synthetic(64, 4, 4.0, 4.0, 1002).expect("valid synthetic path");
    let mut algorithm = AlgorithmConfig::recommended(Algorithm::Fxlms, 0.06);
    algorithm.varsigma = Varsigma::Derived { sigma_d_sq: None };
    Experiment {
        preset: PresetName::Fig2Saturation,
        scenario: ScenarioConfig {
            name: "fig2-saturation".into(),
            noise: NoiseSource::band_limited(2.0, NOISE_BAND.0, NOISE_BAND.1, SAMPLE_RATE, seed),
            primary_path: primary,
            secondary_model: secondary.clone(),
            secondary_path: secondary,
            taps: 512,
            algorithm,
            saturation: Some(SaturationModel::new(1.0, ClipMode::Symmetric).expect("valid clip model")),
            n_samples: 320_000,
            path_changes: Vec::new(),
            record_stride: 16,
            weight_cap: 8,
            initial_weights: None,
            measurement_noise: Some(NoiseSource::white(SENSOR_NOISE_VARIANCE, SAMPLE_RATE, sensor_seed(seed))),
        },
        synthetic_paths: true,
        reference_points: Vec::new(),
    }
}

/// Resolve a named preset. `custom` needs a scenario from a config file.
pub fn preset(name: PresetName, seed: u64) -> Result<Experiment> {
    match name {
        PresetName::Fig2Saturation => Ok(fig2_saturation(seed)),
        PresetName::Fig3Static => Ok(fig3_static(seed)),
        PresetName::Fig5Varying => Ok(fig5_varying(seed)),
        PresetName::Custom => Err(Error::Config("the custom preset requires --config <file>".into())),
    }
}

/// Wrap a user-supplied scenario as a `custom` experiment.
pub fn custom(scenario: ScenarioConfig) -> Result<Experiment> {
    scenario.validate()?;
    Ok(Experiment { preset: PresetName::Custom, scenario, synthetic_paths: false, reference_points: Vec::new() })
}

/// Keys accepted by [`apply_override`].
pub const OVERRIDE_KEYS: &[&str] = &[
    "seed",
    "n_samples",
    "taps",
    "record_stride",
    "weight_cap",
    "noise_variance",
    "band_low",
    "band_high",
    "sensor_noise_variance",
    "mu1_initial",
    "mu_min",
    "gamma",
    "kappa",
    "rho_sq",
    "varsigma",
    "sigma_d_sq",
    "power_smoothing",
    "power_estimator",
    "step_floor",
    "momentum_on_switch",
    "clip_threshold",
    "clip_mode",
    "change_at",
    "change_rho_sq",
];

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Config(format!("invalid value `{value}` for `{key}`")))
}

fn need_change<'a>(s: &'a mut ScenarioConfig, key: &str) -> Result<&'a mut PathChange> {
    s.path_changes
        .first_mut()
        .ok_or_else(|| Error::Config(format!("`{key}` needs a scenario with a path change")))
}

fn need_band<'a>(s: &'a mut ScenarioConfig, key: &str) -> Result<&'a mut (f64, f64)> {
    s.noise.band.as_mut().ok_or_else(|| Error::Config(format!("`{key}` needs band-limited noise")))
}

/// Set one scenario parameter from its textual form.
pub fn apply_override(s: &mut ScenarioConfig, key: &str, value: &str) -> Result<()> {
    let a = &mut s.algorithm;
    match key {
        "seed" => {
            s.noise.seed = parse(key, value)?;
            if let Some(m) = &mut s.measurement_noise {
                m.seed = sensor_seed(s.noise.seed);
            }
        }
        "sensor_noise_variance" => {
            s.measurement_noise = if value == "none" {
                None
            } else {
                Some(NoiseSource::white(parse(key, value)?, s.noise.sample_rate, sensor_seed(s.noise.seed)))
            }
        }
        "n_samples" => {
            let n: usize = parse(key, value)?;
            // keep a single environment change at the midpoint
            if let [change] = s.path_changes.as_mut_slice() {
                if change.at == s.n_samples / 2 {
                    change.at = n / 2;
                }
            }
            s.n_samples = n;
        }
        "taps" => s.taps = parse(key, value)?,
        "record_stride" => s.record_stride = parse(key, value)?,
        "weight_cap" => s.weight_cap = parse(key, value)?,
        "noise_variance" => s.noise.variance = parse(key, value)?,
        "band_low" => need_band(s, key)?.0 = parse(key, value)?,
        "band_high" => need_band(s, key)?.1 = parse(key, value)?,
        "mu1_initial" => a.mu1_initial = parse(key, value)?,
        "mu_min" => a.mu_min = parse(key, value)?,
        "gamma" => a.gamma = parse(key, value)?,
        "kappa" => a.kappa = parse(key, value)?,
        "rho_sq" => a.rho_sq = parse(key, value)?,
        "varsigma" => {
            a.varsigma = if value == "derived" {
                Varsigma::Derived { sigma_d_sq: None }
            } else {
                Varsigma::Fixed(parse(key, value)?)
            }
        }
        "sigma_d_sq" => a.varsigma = Varsigma::Derived { sigma_d_sq: Some(parse(key, value)?) },
        "power_smoothing" => a.power_smoothing = parse(key, value)?,
        "power_estimator" => {
            a.power_estimator = if value == "smoothed" {
                PowerEstimator::Smoothed
            } else {
                PowerEstimator::Projected { reference_smoothing: parse(key, value)? }
            }
        }
        "step_floor" => {
            a.step_floor = match value {
                "floor" => StepFloor::Floor,
                "literal-min" => StepFloor::LiteralMin,
                _ => return Err(Error::Config(format!("invalid value `{value}` for `{key}`"))),
            }
        }
        "momentum_on_switch" => {
            a.momentum_on_switch = match value {
                "reset" => MomentumOnSwitch::Reset,
                "freeze" => MomentumOnSwitch::Freeze,
                "decay" => MomentumOnSwitch::Decay,
                "accumulate" => MomentumOnSwitch::Accumulate,
                _ => return Err(Error::Config(format!("invalid value `{value}` for `{key}`"))),
            }
        }
        "clip_threshold" => {
            s.saturation = if value == "none" {
                None
            } else {
                let mode = s.saturation.as_ref().map(|m| m.mode).unwrap_or_default();
                Some(SaturationModel::new(parse(key, value)?, mode)?)
            }
        }
        "clip_mode" => {
            let mode = match value {
                "symmetric" => ClipMode::Symmetric,
                "upper-only" => ClipMode::UpperOnly,
                _ => return Err(Error::Config(format!("invalid value `{value}` for `{key}`"))),
            };
            match &mut s.saturation {
                Some(m) => m.mode = mode,
                None => return Err(Error::Config("`clip_mode` needs a clip threshold".into())),
            }
        }
        "change_at" => need_change(s, key)?.at = parse(key, value)?,
        "change_rho_sq" => need_change(s, key)?.rho_sq = Some(parse(key, value)?),
        _ => {
            return Err(Error::Config(format!(
                "unknown override key `{key}` (expected one of: {})",
                OVERRIDE_KEYS.join(", ")
            )))
        }
    }
    Ok(())
}
