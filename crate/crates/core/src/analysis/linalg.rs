//! Dense symmetric linear algebra for correlation matrices.
//!
//! Sizes here are at most a few hundred, so plain `O(n³)` routines are used:
//! cyclic Jacobi for eigendecomposition and Cholesky for solves.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{data_err, Error, Result};

/// Square row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(data_err("matrix rows must form a square"));
        }
        Ok(Self { n, data: rows.iter().flatten().copied().collect() })
    }

    /// Symmetric Toeplitz matrix with first row `lags`.
    pub fn toeplitz(lags: &[f64]) -> Self {
        let n = lags.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = lags[i.abs_diff(j)];
            }
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| crate::math::dot(self.row(i), v)).collect()
    }

    /// `vᵀ M v`.
    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        crate::math::dot(v, &self.mul_vec(v))
    }

    /// `self + scale · other`.
    pub fn add_scaled(&self, other: &Matrix, scale: f64) -> Matrix {
        assert_eq!(self.n, other.n, "matrix size mismatch");
        Matrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + scale * b).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|v| v * v).sum())
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        let scale = self.data.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        (0..self.n).all(|i| {
            (i + 1..self.n).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= rel_tol * scale)
        })
    }

    fn require_symmetric(&self) -> Result<()> {
        if !self.is_finite() {
            return Err(data_err("matrix has non-finite entries"));
        }
        if !self.is_symmetric(1e-12) {
            return Err(data_err("matrix is not symmetric"));
        }
        Ok(())
    }
}

impl core::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// Eigenvalues (ascending) and matching eigenvectors (columns of `vectors`).
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl SymmetricEigen {
    pub fn max(&self) -> f64 {
        *self.values.last().unwrap_or(&0.0)
    }

    pub fn min(&self) -> f64 {
        *self.values.first().unwrap_or(&0.0)
    }

    /// `Q Λ Qᵀ`.
    pub fn reconstruct(&self) -> Matrix {
        let n = self.values.len();
        let q = &self.vectors;
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = (0..n).map(|k| q[(i, k)] * self.values[k] * q[(j, k)]).sum();
            }
        }
        m
    }
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
pub fn symmetric_eigen(a: &Matrix) -> Result<SymmetricEigen> {
    a.require_symmetric()?;
    let n = a.size();
    let mut m = a.clone();
    let mut v = Matrix::identity(n);
    let total = a.frobenius_norm();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum();
        if libm::sqrt(off) <= 1e-14 * total || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let mut vectors = Matrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        for k in 0..n {
            vectors[(k, col)] = v[(k, src)];
        }
    }
    Ok(SymmetricEigen { values, vectors })
}

/// Lower Cholesky factor, or `None` if a pivot is not positive.
fn cholesky(a: &Matrix) -> Option<Matrix> {
    let n = a.size();
    let mut l = Matrix::zeros(n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0) {
            return None;
        }
        let djj = libm::sqrt(d);
        l[(j, j)] = djj;
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / djj;
        }
    }
    Some(l)
}

fn cholesky_solve(l: &Matrix, b: &[f64]) -> Vec<f64> {
    let n = l.size();
    let mut y = vec![0.0; n];
    for i in 0..n {
        let s: f64 = (0..i).map(|k| l[(i, k)] * y[k]).sum();
        y[i] = (b[i] - s) / l[(i, i)];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| l[(k, i)] * x[k]).sum();
        x[i] = (y[i] - s) / l[(i, i)];
    }
    x
}

/// Solution of a symmetric positive (semi-)definite system.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdSolution {
    pub x: Vec<f64>,
    /// Diagonal loading that was added before the factorisation succeeded.
    pub jitter: Option<f64>,
    /// Estimate of `λ_max / λ_min`.
    pub condition: f64,
}

fn condition_estimate(a: &Matrix, l: &Matrix) -> f64 {
    let n = a.size();
    let start: Vec<f64> = (0..n).map(|i| 1.0 + 0.01 * i as f64).collect();
    let normalize = |v: &mut Vec<f64>| {
        let nv = crate::math::norm(v);
        if nv > 0.0 {
            v.iter_mut().for_each(|x| *x /= nv);
        }
        nv
    };
    let mut v = start.clone();
    normalize(&mut v);
    let mut lmax = 0.0;
    for _ in 0..200 {
        let mut w = a.mul_vec(&v);
        lmax = normalize(&mut w);
        v = w;
    }
    let mut u = start;
    normalize(&mut u);
    let mut inv_min = 0.0;
    for _ in 0..200 {
        let mut w = cholesky_solve(l, &u);
        inv_min = normalize(&mut w);
        u = w;
    }
    lmax * inv_min
}

/// Solve `A x = b` for symmetric positive definite `A`.
///
/// When plain Cholesky fails, diagonal loading starting at
/// `1e-12 · trace(A)/n` is added (up to three decades) and reported in
/// [`SpdSolution::jitter`]. Systems with a condition estimate of at least
/// `max_condition` are rejected as singular.
pub fn solve_spd(a: &Matrix, b: &[f64], max_condition: f64) -> Result<SpdSolution> {
    a.require_symmetric()?;
    let n = a.size();
    if b.len() != n {
        return Err(data_err("right-hand side length does not match matrix"));
    }
    if n == 0 {
        return Err(data_err("empty system"));
    }
    let scale = (a.trace() / n as f64).abs().max(f64::MIN_POSITIVE);
    let mut jitter = None;
    let mut factor = cholesky(a).map(|l| (l, a.clone()));
    let mut eps = 1e-12 * scale;
    while factor.is_none() && eps <= 1e-9 * scale {
        let loaded = a.add_scaled(&Matrix::identity(n), eps);
        factor = cholesky(&loaded).map(|l| (l, loaded));
        jitter = Some(eps);
        eps *= 10.0;
    }
    let Some((l, used)) = factor else {
        return Err(Error::Singular { condition: f64::INFINITY });
    };
    let condition = condition_estimate(&used, &l);
    if !(condition < max_condition) {
        return Err(Error::Singular { condition });
    }
    Ok(SpdSolution { x: cholesky_solve(&l, b), jitter, condition })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_eigenvalues() {
        let e = symmetric_eigen(&Matrix::diagonal(&[2.0, 0.5])).unwrap();
        assert_eq!(e.values, vec![0.5, 2.0]);
    }

    #[test]
    fn two_by_two_eigen() {
        let m = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let e = symmetric_eigen(&m).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!((e.values[1] - 3.0).abs() < 1e-14);
        let r = e.reconstruct();
        assert!(r.add_scaled(&m, -1.0).frobenius_norm() < 1e-14);
    }

    #[test]
    fn asymmetric_rejected() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(symmetric_eigen(&m), Err(Error::Data(_))));
        assert!(matches!(solve_spd(&m, &[1.0, 1.0], 1e12), Err(Error::Data(_))));
    }

    #[test]
    fn spd_solve_residual() {
        let m = Matrix::from_rows(&[
            vec![4.0, 1.0, 0.5],
            vec![1.0, 3.0, 0.2],
            vec![0.5, 0.2, 2.0],
        ])
        .unwrap();
        let b = [1.0, -2.0, 0.5];
        let s = solve_spd(&m, &b, 1e12).unwrap();
        let r = m.mul_vec(&s.x);
        for i in 0..3 {
            assert!((r[i] - b[i]).abs() < 1e-13);
        }
        assert!(s.jitter.is_none());
        assert!(s.condition > 1.0 && s.condition < 10.0);
    }

    #[test]
    fn singular_reports_condition() {
        let m = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        match solve_spd(&m, &[1.0, 1.0], 1e12) {
            Err(Error::Singular { condition }) => assert!(condition >= 1e12),
            other => panic!("expected singular, got {other:?}"),
        }
    }

    #[test]
    fn toeplitz_layout() {
        let t = Matrix::toeplitz(&[3.0, 2.0, 1.0]);
        assert_eq!(t.row(0), &[3.0, 2.0, 1.0]);
        assert_eq!(t.row(2), &[1.0, 2.0, 3.0]);
    }
}
