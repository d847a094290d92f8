use alloc::vec::Vec;
use core::f64::consts::PI;

use super::Matrix;
use crate::error::{config_err, data_err, Result};

/// Expected output power `wᵀ R_x w` of a filter driven by a reference with
/// autocorrelation `r_x`.
pub fn output_power(weights: &[f64], r_x: &Matrix) -> f64 {
    r_x.quadratic_form(weights)
}

/// `points` samples of the two-weight constraint ellipse `wᵀ R_x w = ρ²`.
pub fn constraint_boundary(r_x: &Matrix, rho_sq: f64, points: usize) -> Result<Vec<[f64; 2]>> {
    if r_x.size() != 2 {
        return Err(data_err("constraint boundary needs a 2x2 correlation matrix"));
    }
    if !(rho_sq.is_finite() && rho_sq > 0.0) {
        return Err(config_err("rho_sq must be > 0"));
    }
    let rho = libm::sqrt(rho_sq);
    (0..points)
        .map(|i| {
            let theta = 2.0 * PI * i as f64 / points as f64;
            let u = [libm::cos(theta), libm::sin(theta)];
            let q = r_x.quadratic_form(&u);
            if !(q > 0.0) {
                return Err(data_err("correlation matrix is not positive definite"));
            }
            let r = rho / libm::sqrt(q);
            Ok([r * u[0], r * u[1]])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn points_lie_on_ellipse() {
        let r = Matrix::from_rows(&[vec![1.2, 0.3], vec![0.3, 0.8]]).unwrap();
        let pts = constraint_boundary(&r, 1.5, 256).unwrap();
        assert_eq!(pts.len(), 256);
        for p in pts {
            assert!((output_power(&p, &r) - 1.5).abs() < 1e-12);
        }
    }

    #[test]
    fn wrong_size_rejected() {
        assert!(constraint_boundary(&Matrix::identity(3), 1.0, 8).is_err());
        assert!(constraint_boundary(&Matrix::identity(2), 0.0, 8).is_err());
    }
}
