use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{config_err, Result};

/// Order of the linear-phase bandpass used for band-limited noise.
pub const BANDPASS_ORDER: usize = 255;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    WhiteGaussian,
    BandLimited,
}

/// Seeded primary-noise source.
///
/// A variance of zero is accepted and yields silence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSource {
    pub kind: NoiseKind,
    pub variance: f64,
    #[serde(default)]
    pub band: Option<(f64, f64)>,
    pub sample_rate: f64,
    pub seed: u64,
}

impl NoiseSource {
    pub fn white(variance: f64, sample_rate: f64, seed: u64) -> Self {
        Self { kind: NoiseKind::WhiteGaussian, variance, band: None, sample_rate, seed }
    }

    pub fn band_limited(variance: f64, low: f64, high: f64, sample_rate: f64, seed: u64) -> Self {
        Self { kind: NoiseKind::BandLimited, variance, band: Some((low, high)), sample_rate, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.variance.is_finite() && self.variance >= 0.0) {
            return Err(config_err("noise variance must be finite and >= 0"));
        }
        if !(self.sample_rate.is_finite() && self.sample_rate > 0.0) {
            return Err(config_err("sample_rate must be > 0"));
        }
        match (self.kind, self.band) {
            (NoiseKind::BandLimited, None) => {
                Err(config_err("band-limited noise needs a band (low, high)"))
            }
            (_, Some((lo, hi))) if !(0.0 < lo && lo < hi && hi < self.sample_rate / 2.0) => Err(
                config_err("noise band must satisfy 0 < low < high < sample_rate/2"),
            ),
            _ => Ok(()),
        }
    }
}

/// Hamming-windowed sinc bandpass of order [`BANDPASS_ORDER`].
pub fn bandpass_fir(low: f64, high: f64, sample_rate: f64) -> Vec<f64> {
    let taps = BANDPASS_ORDER + 1;
    let mid = BANDPASS_ORDER as f64 / 2.0;
    let f1 = low / sample_rate;
    let f2 = high / sample_rate;
    let sinc = |x: f64| if x == 0.0 { 1.0 } else { libm::sin(PI * x) / (PI * x) };
    (0..taps)
        .map(|n| {
            let t = n as f64 - mid;
            let ideal = 2.0 * f2 * sinc(2.0 * f2 * t) - 2.0 * f1 * sinc(2.0 * f1 * t);
            let w = 0.54 - 0.46 * libm::cos(2.0 * PI * n as f64 / BANDPASS_ORDER as f64);
            ideal * w
        })
        .collect()
}

/// Draw `n` samples from `source`.
///
/// Band-limited noise is white Gaussian noise passed through
/// [`bandpass_fir`]; the filter transient is discarded so the returned block
/// is stationary from its first sample. The output is scaled so that its
/// expected power equals `source.variance`.
pub fn generate(source: &NoiseSource, n: usize) -> Result<Vec<f64>> {
    source.validate()?;
    if n == 0 {
        return Err(config_err("sample count must be >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(source.seed);
    match source.kind {
        NoiseKind::WhiteGaussian => {
            let sd = libm::sqrt(source.variance);
            Ok((0..n).map(|_| sd * rng.sample::<f64, _>(StandardNormal)).collect())
        }
        NoiseKind::BandLimited => {
            let (lo, hi) = source.band.expect("validated");
            let h = bandpass_fir(lo, hi, source.sample_rate);
            let gain: f64 = h.iter().map(|c| c * c).sum();
            let scale = libm::sqrt(source.variance / gain);
            let warm = h.len() - 1;
            let white: Vec<f64> =
                (0..n + warm).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            Ok((warm..n + warm)
                .map(|i| {
                    let acc: f64 = h.iter().enumerate().map(|(k, c)| c * white[i - k]).sum();
                    scale * acc
                })
                .collect())
        }
    }
}
