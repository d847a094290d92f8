use alloc::vec::Vec;

use super::linalg::solve_spd;
use super::{CorrelationModel, MAX_CONDITION};
use crate::error::{config_err, Result};

/// Cross-correlation paired with the regularised matrix in the
/// constrained solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CrossCorrelation {
    /// `P_dx`, the unfiltered reference (as the closed form is usually printed).
    #[default]
    Reference,
    /// `P_dx'`, matching the unconstrained solution.
    Filtered,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WienerSolution {
    pub weights: Vec<f64>,
    /// Diagonal loading applied by the solver, if any.
    pub jitter: Option<f64>,
    pub condition: f64,
}

/// Unconstrained optimum: solves `R_x' w = P_dx'`.
pub fn wiener_optimal(model: &CorrelationModel) -> Result<WienerSolution> {
    let s = solve_spd(&model.r_xprime, &model.p_dxprime, MAX_CONDITION)?;
    Ok(WienerSolution { weights: s.x, jitter: s.jitter, condition: s.condition })
}

/// Output-constrained optimum: solves `(ς R_x + R_x') w = P`.
pub fn wiener_suboptimal(
    model: &CorrelationModel,
    varsigma: f64,
    cross: CrossCorrelation,
) -> Result<WienerSolution> {
    if !(varsigma.is_finite() && varsigma >= 0.0) {
        return Err(config_err("varsigma must be finite and >= 0"));
    }
    let a = model.r_xprime.add_scaled(&model.r_x, varsigma);
    let p = match cross {
        CrossCorrelation::Reference => &model.p_dx,
        CrossCorrelation::Filtered => &model.p_dxprime,
    };
    let s = solve_spd(&a, p, MAX_CONDITION)?;
    Ok(WienerSolution { weights: s.x, jitter: s.jitter, condition: s.condition })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acoustics::{convolve, generate, FirPath, NoiseSource};
    use crate::analysis::build_correlation_model;
    use crate::error::Error;
    use alloc::vec;

    fn two_weight_model(primary: &[f64]) -> CorrelationModel {
        let x = generate(&NoiseSource::white(1.0, 16_000.0, 5), 200_000).unwrap();
        let d = convolve(&FirPath::new(primary.to_vec()).unwrap(), &x);
        build_correlation_model(&x, &d, &FirPath::identity(), 2).unwrap()
    }

    #[test]
    fn identity_path_recovers_primary() {
        let w = wiener_optimal(&two_weight_model(&[1.76, 1.25])).unwrap().weights;
        assert!((w[0] - 1.76).abs() < 1e-3 && (w[1] - 1.25).abs() < 1e-3, "{w:?}");
    }

    #[test]
    fn zero_disturbance_gives_zero() {
        let x = generate(&NoiseSource::white(1.0, 16_000.0, 5), 1_000).unwrap();
        let d = vec![0.0; x.len()];
        let m = build_correlation_model(&x, &d, &FirPath::identity(), 4).unwrap();
        assert!(wiener_optimal(&m).unwrap().weights.iter().all(|w| *w == 0.0));
    }

    #[test]
    fn zero_penalty_equals_optimum() {
        let m = two_weight_model(&[0.7, -0.4]);
        let a = wiener_optimal(&m).unwrap().weights;
        let b = wiener_suboptimal(&m, 0.0, CrossCorrelation::Reference).unwrap().weights;
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-12));
    }

    #[test]
    fn singular_reference_rejected() {
        let x: Vec<f64> = (0..100).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let d = x.clone();
        let mut m = build_correlation_model(&x, &d, &FirPath::identity(), 2).unwrap();
        // force exact rank deficiency
        m.r_xprime = crate::analysis::Matrix::toeplitz(&[1.0, -1.0]);
        assert!(matches!(wiener_optimal(&m), Err(Error::Singular { .. })));
    }
}
