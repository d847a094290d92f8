//! Library results against independently coded reference computations.

// index loops mirror the update equations term by term
#![allow(clippy::needless_range_loop)]

use ancsat_core::acoustics::{convolve, FirPath};
use ancsat_core::analysis::linalg::symmetric_eigen;
use ancsat_core::analysis::{build_correlation_model, wiener_optimal, Matrix};
use ancsat_core::controllers::{
    Algorithm, AlgorithmConfig, Controller, FilteredReferenceState, StepInput, Varsigma,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

#[test]
fn streaming_convolution_matches_direct_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for len in [1, 2, 7, 64] {
        let h = gaussian(&mut rng, len);
        let x = gaussian(&mut rng, 500);
        let path = FirPath::new(h.clone()).unwrap();
        let batch = convolve(&path, &x);
        let mut history = vec![0.0; len];
        for n in 0..x.len() {
            let expected: f64 = (0..len).filter(|&k| k <= n).map(|k| h[k] * x[n - k]).sum();
            history.rotate_right(1);
            history[0] = x[n];
            let streamed = path.convolve_stream(&history).unwrap();
            assert!((streamed - expected).abs() <= 1e-12, "len {len} n {n}");
            assert!((batch[n] - expected).abs() <= 1e-12);
        }
    }
}

/// Per-sample reference implementation of all four algorithms, written from
/// the update equations without sharing code with the library.
struct Oracle {
    w: Vec<f64>,
    z: Vec<f64>,
    mu: f64,
    p: f64,
}

impl Oracle {
    fn step(&mut self, c: &AlgorithmConfig, varsigma: f64, x: &[f64], xp: &[f64], y: f64, e: f64) {
        let a = c.power_smoothing;
        self.p = a * self.p + (1.0 - a) * y * y;
        let over = self.p > c.rho_sq;
        match c.algorithm {
            Algorithm::Fxlms => {
                for i in 0..self.w.len() {
                    self.w[i] += self.mu * e * xp[i];
                }
            }
            Algorithm::Rescaling => {
                for i in 0..self.w.len() {
                    self.w[i] += self.mu * e * xp[i];
                }
                if over {
                    let s = (c.rho_sq / self.p).sqrt();
                    for w in &mut self.w {
                        *w *= s;
                    }
                    self.p = c.rho_sq;
                }
            }
            Algorithm::TwoGradient | Algorithm::TwoGradientMomentum if over => {
                for i in 0..self.w.len() {
                    self.w[i] -= varsigma * self.mu * y * x[i];
                }
                self.mu = (c.gamma * self.mu).max(c.mu_min);
                self.z.iter_mut().for_each(|z| *z = 0.0);
            }
            Algorithm::TwoGradient => {
                for i in 0..self.w.len() {
                    self.w[i] += self.mu * e * xp[i];
                }
            }
            Algorithm::TwoGradientMomentum => {
                for i in 0..self.w.len() {
                    self.z[i] = c.kappa * self.z[i] + self.mu * e * xp[i];
                    self.w[i] += self.z[i];
                }
            }
        }
    }
}

#[test]
fn updates_match_oracle_loop_over_50_steps() {
    let taps = 4;
    let s_hat = vec![0.9, -0.3, 0.2];
    let p = [0.0, 0.4, 1.1, -0.6, 0.3];
    for alg in Algorithm::ALL {
        let mut c = AlgorithmConfig::recommended(alg, 0.05);
        c.mu1_initial = 0.05;
        c.mu_min = 0.004;
        c.gamma = 0.8;
        c.kappa = 0.6;
        c.power_smoothing = 0.7;
        c.varsigma = Varsigma::Fixed(0.85);
        let mut ctl = Controller::new(c.clone(), taps, 0.85).unwrap();
        let mut oracle = Oracle { w: vec![0.0; taps], z: vec![0.0; taps], mu: c.mu1_initial, p: 0.0 };
        let mut fr = FilteredReferenceState::new(FirPath::new(s_hat.clone()).unwrap(), taps);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x = gaussian(&mut rng, 50);
        let mut exceeded = 0;
        for n in 0..50 {
            fr.push(x[n]).unwrap();
            let xr: Vec<f64> = (0..taps).map(|k| if n >= k { x[n - k] } else { 0.0 }).collect();
            let xp: Vec<f64> = (0..taps)
                .map(|k| (0..s_hat.len()).filter(|&j| n >= k + j).map(|j| s_hat[j] * x[n - k - j]).sum())
                .collect();
            let d: f64 = (0..p.len()).filter(|&k| n >= k).map(|k| p[k] * x[n - k]).sum();
            let y: f64 = oracle.w.iter().zip(&xr).map(|(a, b)| a * b).sum();
            let e = d - y; // identity plant for the error signal
            for (a, b) in fr.reference().iter().zip(&xr) {
                assert!((a - b).abs() <= 1e-12);
            }
            for (a, b) in fr.filtered().iter().zip(&xp) {
                assert!((a - b).abs() <= 1e-12);
            }
            let lib_y = ctl.output(fr.reference());
            assert!((lib_y - y).abs() <= 1e-12, "{alg:?} step {n}");
            let input = StepInput { reference: fr.reference(), filtered_reference: fr.filtered(), output: y, error: e };
            if ctl.step(&input).unwrap() == ancsat_core::controllers::Branch::Exceeded {
                exceeded += 1;
            }
            oracle.step(&c, 0.85, &xr, &xp, y, e);
            for (a, b) in ctl.weights().iter().zip(&oracle.w) {
                assert!((a - b).abs() <= 1e-12, "{alg:?} step {n}: {a} vs {b}");
            }
            assert!((ctl.state().step_size - oracle.mu).abs() <= 1e-15);
            assert!((ctl.state().output_power_estimate - oracle.p).abs() <= 1e-12);
        }
        if alg.is_constrained() {
            assert!(exceeded > 0, "{alg:?} never hit the constraint; the oracle check is too weak");
        }
    }
}

/// Batch least squares on the full regression `d(n) ≈ wᵀx'(n)`.
fn least_squares(xp: &[f64], d: &[f64], taps: usize) -> Vec<f64> {
    let mut a = vec![vec![0.0; taps]; taps];
    let mut b = vec![0.0; taps];
    for n in 0..xp.len() {
        for i in 0..taps {
            let xi = if n >= i { xp[n - i] } else { 0.0 };
            b[i] += xi * d[n];
            for j in 0..taps {
                let xj = if n >= j { xp[n - j] } else { 0.0 };
                a[i][j] += xi * xj;
            }
        }
    }
    // Gaussian elimination with partial pivoting
    for col in 0..taps {
        let piv = (col..taps).max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs())).unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..taps {
            let f = a[r][col] / a[col][col];
            for k in col..taps {
                a[r][k] -= f * a[col][k];
            }
            b[r] -= f * b[col];
        }
    }
    let mut w = vec![0.0; taps];
    for i in (0..taps).rev() {
        let s: f64 = (i + 1..taps).map(|k| a[i][k] * w[k]).sum();
        w[i] = (b[i] - s) / a[i][i];
    }
    w
}

#[test]
fn wiener_matches_least_squares_on_random_plants() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..12 {
        let taps = 1 + trial % 8;
        let s_hat = FirPath::new(gaussian(&mut rng, 1 + trial % 3)).unwrap();
        let primary = FirPath::new(gaussian(&mut rng, taps)).unwrap();
        let x = gaussian(&mut rng, 20_000);
        let d = convolve(&primary, &x);
        let xp = convolve(&s_hat, &x);
        let model = build_correlation_model(&x, &d, &s_hat, taps).unwrap();
        let w = wiener_optimal(&model).unwrap().weights;
        let ls = least_squares(&xp, &d, taps);
        let err: f64 = w.iter().zip(&ls).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let scale: f64 = ls.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(err <= 0.02 * scale, "trial {trial}: {w:?} vs {ls:?}");
    }
}

#[test]
fn correlation_matches_double_loop() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let taps = 6;
    let x = gaussian(&mut rng, 400);
    let d = gaussian(&mut rng, 400);
    let s_hat = FirPath::new(vec![0.5, 0.25, -0.1]).unwrap();
    let m = build_correlation_model(&x, &d, &s_hat, taps).unwrap();
    let xp = convolve(&s_hat, &x);
    let n = x.len();
    let lag = |a: &[f64], b: &[f64], k: usize| (k..n).map(|i| a[i] * b[i - k]).sum::<f64>() / n as f64;
    for i in 0..taps {
        assert!((m.p_dx[i] - lag(&d, &x, i)).abs() <= 1e-10);
        assert!((m.p_dxprime[i] - lag(&d, &xp, i)).abs() <= 1e-10);
        for j in 0..taps {
            let k = i.abs_diff(j);
            assert!((m.r_x[(i, j)] - lag(&x, &x, k)).abs() <= 1e-10);
            assert!((m.r_xprime[(i, j)] - lag(&xp, &xp, k)).abs() <= 1e-10);
        }
    }
}

#[test]
fn jacobi_reconstructs_random_symmetric_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in [1, 2, 5, 16, 64] {
        let mut a = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let v: f64 = rng.sample(StandardNormal);
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
        }
        let eig = symmetric_eigen(&a).unwrap();
        let r = eig.reconstruct();
        let diff = r.add_scaled(&a, -1.0).frobenius_norm();
        assert!(diff <= 1e-10 * a.frobenius_norm().max(1.0), "n={n}: {diff}");
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
        let trace: f64 = eig.values.iter().sum();
        assert!((trace - a.trace()).abs() <= 1e-9 * n as f64);
    }
}
