use crate::error::{config_err, Result};

/// Lagrangian factor coupling the two gradient directions.
///
/// `η² = max(σ_d² / (G_s ρ²), 1)` and `ς = G_s (η - 1)`, so ς is exactly zero
/// whenever the disturbance can be cancelled within the power limit.
pub fn lagrangian_factor(power_gain: f64, sigma_d_sq: f64, rho_sq: f64) -> Result<f64> {
    for (name, v) in [("G_s", power_gain), ("sigma_d^2", sigma_d_sq), ("rho^2", rho_sq)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(config_err(alloc::format!("{name} must be finite and > 0")));
        }
    }
    let eta_sq = (sigma_d_sq / (power_gain * rho_sq)).max(1.0);
    Ok(power_gain * (libm::sqrt(eta_sq) - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slack_constraint_gives_zero() {
        assert_eq!(lagrangian_factor(1.0, 1.0, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn unit_gain_example() {
        assert!((lagrangian_factor(1.0, 4.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn secondary_path_gain_example() {
        let gs = 0.13f64 * 0.13 + 0.87 * 0.87;
        let v = lagrangian_factor(gs, 4.0, 1.0).unwrap();
        let expected = 0.7738 * (libm::sqrt(4.0 / 0.7738) - 1.0);
        assert!((v - expected).abs() < 1e-12);
        assert!((v - 0.9856).abs() < 5e-4);
    }

    #[test]
    fn rejects_non_positive() {
        assert!(lagrangian_factor(0.0, 1.0, 1.0).is_err());
        assert!(lagrangian_factor(1.0, -1.0, 1.0).is_err());
        assert!(lagrangian_factor(1.0, 1.0, 0.0).is_err());
    }
}
