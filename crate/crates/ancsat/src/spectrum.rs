//! Welch power spectral density estimation.

use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Default segment length for a 16 kHz, 200–800 Hz analysis.
pub const DEFAULT_SEGMENT: usize = 4096;

/// One-sided power spectral density.
#[derive(Debug, Clone, PartialEq)]
pub struct Psd {
    /// Bin centre frequencies in Hz.
    pub frequencies: Vec<f64>,
    /// Power per Hz.
    pub density: Vec<f64>,
}

impl Psd {
    pub fn bin_width(&self) -> f64 {
        self.frequencies.get(1).copied().unwrap_or(0.0)
    }

    /// Integrated power between `low` and `high` Hz (inclusive bins).
    pub fn band_power(&self, low: f64, high: f64) -> f64 {
        let df = self.bin_width();
        self.frequencies
            .iter()
            .zip(&self.density)
            .filter(|(f, _)| **f >= low && **f <= high)
            .map(|(_, p)| p * df)
            .sum()
    }

    pub fn total_power(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.bin_width()
    }

    pub fn peak_frequency(&self) -> f64 {
        let (i, _) = self
            .density
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap_or((0, &0.0));
        self.frequencies[i]
    }

    pub fn to_db(&self) -> Vec<f64> {
        self.density.iter().map(|p| 10.0 * p.max(1e-300).log10()).collect()
    }
}

fn hann(n: usize) -> Vec<f64> {
    (0..n).map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos()).collect()
}

/// Averaged modified periodograms with a periodic Hann window.
///
/// Each segment has its mean removed. `overlap` is in samples and must be
/// smaller than `segment_length`.
pub fn welch_psd(signal: &[f64], sample_rate: f64, segment_length: usize, overlap: usize) -> Result<Psd> {
    if segment_length < 2 || overlap >= segment_length {
        return Err(Error::Analysis(format!(
            "invalid Welch parameters: segment {segment_length}, overlap {overlap}"
        )));
    }
    if signal.len() < segment_length {
        return Err(Error::Analysis(format!(
            "segment length {segment_length} exceeds signal length {}",
            signal.len()
        )));
    }
    if signal.iter().any(|v| !v.is_finite()) {
        return Err(Error::Analysis("non-finite sample in PSD input".into()));
    }
    let window = hann(segment_length);
    let window_power: f64 = window.iter().map(|w| w * w).sum();
    let fft = FftPlanner::new().plan_fft_forward(segment_length);
    let bins = segment_length / 2 + 1;
    let mut acc = vec![0.0; bins];
    let hop = segment_length - overlap;
    let mut segments = 0usize;
    let mut buf = vec![Complex::new(0.0, 0.0); segment_length];
    let mut start = 0;
    while start + segment_length <= signal.len() {
        let seg = &signal[start..start + segment_length];
        let mean = seg.iter().sum::<f64>() / segment_length as f64;
        for ((b, s), w) in buf.iter_mut().zip(seg).zip(&window) {
            *b = Complex::new((s - mean) * w, 0.0);
        }
        fft.process(&mut buf);
        for (a, b) in acc.iter_mut().zip(&buf) {
            *a += b.norm_sqr();
        }
        segments += 1;
        start += hop;
    }
    let scale = 1.0 / (sample_rate * window_power * segments as f64);
    let density = acc
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let one_sided = if k == 0 || (segment_length.is_multiple_of(2) && k == bins - 1) { 1.0 } else { 2.0 };
            p * scale * one_sided
        })
        .collect();
    let frequencies = (0..bins).map(|k| k as f64 * sample_rate / segment_length as f64).collect();
    Ok(Psd { frequencies, density })
}
