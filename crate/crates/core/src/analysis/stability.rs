use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::linalg::symmetric_eigen;
use super::CorrelationModel;
use crate::error::{config_err, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    /// Largest eigenvalue of `R_x'`.
    pub lambda_max: f64,
    /// Smallest eigenvalue of `R_x'`.
    pub lambda_min: f64,
    /// Largest eigenvalue of `R_x`, which governs the power branch.
    pub lambda_max_reference: f64,
    /// `(1+κ)/λ_max`: upper bound on μ₁ for the error-gradient branch.
    pub mu1_bound: f64,
    /// `1/λ_max(R_x)`: upper bound on `ς μ₁` for the power branch.
    pub mu2_bound: f64,
    /// Per-mode time constants, in eigenvalue order (ascending).
    pub time_constants: Vec<f64>,
    pub mu1_within_bound: bool,
    pub varsigma_mu1_within_bound: bool,
}

/// Step-size bounds and time constants for a controller running at `mu1`.
pub fn stability_bounds(
    model: &CorrelationModel,
    kappa: f64,
    varsigma: f64,
    mu1: f64,
) -> Result<StabilityReport> {
    if kappa.abs() >= 1.0 {
        return Err(config_err("kappa must satisfy |kappa| < 1"));
    }
    let filtered = symmetric_eigen(&model.r_xprime)?;
    let reference = symmetric_eigen(&model.r_x)?;
    let lambda_max = filtered.max();
    let lambda_min = filtered.min().max(0.0);
    let lambda_max_reference = reference.max();
    let mu1_bound = (1.0 + kappa) / lambda_max;
    let mu2_bound = 1.0 / lambda_max_reference;
    let time_constants = filtered
        .values
        .iter()
        .map(|&l| time_constant(mu1, kappa, l.max(0.0)))
        .collect();
    Ok(StabilityReport {
        lambda_max,
        lambda_min,
        lambda_max_reference,
        mu1_bound,
        mu2_bound,
        time_constants,
        mu1_within_bound: mu1 > 0.0 && mu1 < mu1_bound,
        varsigma_mu1_within_bound: varsigma * mu1 < mu2_bound,
    })
}

/// `τ ≃ ((1+κ)/(1+2κ)) / (2 μ₁ λ)` in samples.
///
/// Infinite when `μ₁ λ = 0`.
pub fn time_constant(mu1: f64, kappa: f64, lambda: f64) -> f64 {
    ((1.0 + kappa) / (1.0 + 2.0 * kappa)) / (2.0 * mu1 * lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::Matrix;
    use alloc::vec;

    fn diag_model(values: &[f64]) -> CorrelationModel {
        CorrelationModel {
            r_x: Matrix::diagonal(values),
            r_xprime: Matrix::diagonal(values),
            p_dx: vec![0.0; values.len()],
            p_dxprime: vec![0.0; values.len()],
        }
    }

    #[test]
    fn kappa_zero_is_classical_bound() {
        let r = stability_bounds(&diag_model(&[2.0, 0.5]), 0.0, 0.0, 0.1).unwrap();
        assert!((r.mu1_bound - 0.5).abs() < 1e-15);
    }

    #[test]
    fn momentum_bound() {
        let r = stability_bounds(&diag_model(&[2.0, 0.5]), 0.99, 0.85, 1e-5).unwrap();
        assert!((r.mu1_bound - 1.99 / 2.0).abs() < 1e-15);
        assert!((r.mu2_bound - 0.5).abs() < 1e-15);
        assert_eq!(r.lambda_min, 0.5);
        assert!(r.mu1_within_bound && r.varsigma_mu1_within_bound);
    }

    #[test]
    fn diagonal_example() {
        let r = stability_bounds(&diag_model(&[2.0, 0.5]), 0.5, 0.0, 1.0).unwrap();
        assert_eq!(r.lambda_max, 2.0);
        assert!((r.mu1_bound - 0.75).abs() < 1e-15);
        assert!(!r.mu1_within_bound);
    }

    #[test]
    fn asymmetric_rejected() {
        let mut m = diag_model(&[1.0, 1.0]);
        m.r_xprime = Matrix::from_rows(&[vec![1.0, 0.5], vec![0.0, 1.0]]).unwrap();
        assert!(stability_bounds(&m, 0.0, 0.0, 0.1).is_err());
    }

    #[test]
    fn time_constant_values() {
        assert!((time_constant(1e-3, 0.0, 2.0) - 250.0).abs() < 1e-9);
        let tau = time_constant(1e-5, 0.99, 1.0);
        assert!((tau - (1.99 / 2.98) / 2e-5).abs() < 1e-6);
        assert!((tau - 33_389.0).abs() < 1.0);
    }
}
