use alloc::vec::Vec;

use super::Matrix;
use crate::acoustics::{convolve, FirPath};
use crate::error::{config_err, data_err, Result};

/// Second-order statistics of reference, filtered reference and disturbance.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationModel {
    /// Autocorrelation matrix of `x`.
    pub r_x: Matrix,
    /// Autocorrelation matrix of `x' = x * ŝ`.
    pub r_xprime: Matrix,
    /// `E[d(n) x(n-k)]`.
    pub p_dx: Vec<f64>,
    /// `E[d(n) x'(n-k)]`.
    pub p_dxprime: Vec<f64>,
}

impl CorrelationModel {
    pub fn taps(&self) -> usize {
        self.p_dx.len()
    }
}

/// Biased lag estimate `(1/N) Σ_{n>=k} a(n) b(n-k)` for `k < taps`.
fn lag_sums(a: &[f64], b: &[f64], taps: usize) -> Vec<f64> {
    let n = a.len() as f64;
    (0..taps)
        .map(|k| a[k..].iter().zip(b).map(|(x, y)| x * y).sum::<f64>() / n)
        .collect()
}

/// Sample statistics over whole signals.
///
/// Autocorrelation matrices are Toeplitz in the biased lag estimates, which
/// keeps them positive semi-definite.
pub fn build_correlation_model(
    x: &[f64],
    d: &[f64],
    s_hat: &FirPath,
    taps: usize,
) -> Result<CorrelationModel> {
    if taps == 0 {
        return Err(config_err("taps must be >= 1"));
    }
    if x.len() != d.len() {
        return Err(data_err("reference and disturbance lengths differ"));
    }
    if x.len() < 10 * taps {
        return Err(data_err(alloc::format!(
            "signals of length {} are too short for {taps} taps (need {})",
            x.len(),
            10 * taps
        )));
    }
    if x.iter().chain(d).any(|v| !v.is_finite()) {
        return Err(data_err("non-finite sample in correlation input"));
    }
    let xp = convolve(s_hat, x);
    Ok(CorrelationModel {
        r_x: Matrix::toeplitz(&lag_sums(x, x, taps)),
        r_xprime: Matrix::toeplitz(&lag_sums(&xp, &xp, taps)),
        p_dx: lag_sums(d, x, taps),
        p_dxprime: lag_sums(d, &xp, taps),
    })
}
