use alloc::vec;
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{config_err, data_err, Result};

/// Finite impulse response of an acoustic path.
///
/// `coefficients()[k]` is the gain applied to the sample delayed by `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct FirPath {
    coefficients: Vec<f64>,
}

impl FirPath {
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(config_err("FIR path must have at least one tap"));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(config_err("FIR path coefficients must be finite"));
        }
        Ok(Self { coefficients })
    }

    /// The single-tap path `[1]`.
    /// Seeded random impulse response: `delay` leading zeros, then Gaussian
    /// taps under an exponential envelope with time constant `decay`,
    /// scaled to the requested power gain `Σh²`.
    pub fn synthetic(len: usize, delay: usize, decay: f64, power_gain: f64, seed: u64) -> Result<Self> {
        if delay >= len || !(decay > 0.0) || !(power_gain > 0.0) {
            return Err(config_err("synthetic path needs delay < len, decay > 0, gain > 0"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut h = vec![0.0; len];
        for (i, c) in h.iter_mut().enumerate().skip(delay) {
            let g: f64 = rng.sample(StandardNormal);
            *c = g * libm::exp(-((i - delay) as f64) / decay);
        }
        // make the direct sound the strongest arrival
        h[delay] = libm::fabs(h[delay]) + 1.0;
        let scale = libm::sqrt(power_gain / h.iter().map(|v| v * v).sum::<f64>());
        h.iter_mut().for_each(|v| *v *= scale);
        Self::new(h)
    }

    pub fn identity() -> Self {
        Self { coefficients: vec![1.0] }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// White-noise power gain, `Σ h[k]²`.
    pub fn power_gain(&self) -> f64 {
        self.coefficients.iter().map(|c| c * c).sum()
    }

    /// One output sample of the streaming convolution.
    ///
    /// `history[0]` is the newest input sample; samples before the start of
    /// the stream must be supplied as zeros.
    pub fn convolve_stream(&self, history: &[f64]) -> Result<f64> {
        if history.len() < self.coefficients.len() {
            return Err(data_err("input history shorter than FIR path"));
        }
        let window = &history[..self.coefficients.len()];
        if window.iter().any(|x| !x.is_finite()) {
            return Err(data_err("non-finite input sample"));
        }
        Ok(self.apply(window))
    }

    /// Unchecked variant of [`FirPath::convolve_stream`] for the inner loop.
    #[inline]
    pub(crate) fn apply(&self, history: &[f64]) -> f64 {
        crate::math::dot(&self.coefficients, history)
    }
}

impl TryFrom<Vec<f64>> for FirPath {
    type Error = crate::Error;

    fn try_from(value: Vec<f64>) -> Result<Self> {
        Self::new(value)
    }
}

impl From<FirPath> for Vec<f64> {
    fn from(value: FirPath) -> Self {
        value.coefficients
    }
}

/// Full linear convolution truncated to the input length.
pub fn convolve(path: &FirPath, input: &[f64]) -> Vec<f64> {
    let h = path.coefficients();
    (0..input.len())
        .map(|n| {
            h.iter()
                .enumerate()
                .take(n + 1)
                .map(|(k, c)| c * input[n - k])
                .sum()
        })
        .collect()
}

/// Fixed-length sample history, newest sample first.
///
/// The buffer is stored twice so that [`DelayLine::as_slice`] is always a
/// contiguous slice without wrap-around.
#[derive(Debug, Clone)]
pub struct DelayLine {
    buf: Vec<f64>,
    len: usize,
    pos: usize,
}

impl DelayLine {
    pub fn new(len: usize) -> Self {
        let len = len.max(1);
        Self { buf: vec![0.0; 2 * len], len, pos: 0 }
    }

    #[inline]
    pub fn push(&mut self, sample: f64) {
        self.pos = if self.pos == 0 { self.len - 1 } else { self.pos - 1 };
        self.buf[self.pos] = sample;
        self.buf[self.pos + self.len] = sample;
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.buf[self.pos..self.pos + self.len]
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn clear(&mut self) {
        self.buf.iter_mut().for_each(|v| *v = 0.0);
        self.pos = 0;
    }
}
