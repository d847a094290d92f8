use alloc::vec::Vec;

use crate::acoustics::{DelayLine, FirPath};
use crate::error::{data_err, Result};

/// Rolling reference `x(n)` and filtered reference `x'(n) = x(n) * ŝ(n)`.
#[derive(Debug, Clone)]
pub struct FilteredReferenceState {
    secondary_model: FirPath,
    taps: usize,
    reference: DelayLine,
    filtered: DelayLine,
}

impl FilteredReferenceState {
    pub fn new(secondary_model: FirPath, taps: usize) -> Self {
        let taps = taps.max(1);
        // long enough to recompute every filtered sample still in the window
        let ref_len = taps + secondary_model.len() - 1;
        Self {
            secondary_model,
            taps,
            reference: DelayLine::new(ref_len),
            filtered: DelayLine::new(taps),
        }
    }

    /// Push `x(n)` and return `x'(n)`.
    pub fn push(&mut self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(data_err("non-finite reference sample"));
        }
        self.reference.push(x);
        let xf = self.secondary_model.apply(self.reference.as_slice());
        self.filtered.push(xf);
        Ok(xf)
    }

    /// `[x(n), x(n-1), ..., x(n-L_f+1)]`.
    pub fn reference(&self) -> &[f64] {
        &self.reference.as_slice()[..self.taps]
    }

    /// `[x'(n), ..., x'(n-L_f+1)]`.
    pub fn filtered(&self) -> &[f64] {
        self.filtered.as_slice()
    }

    /// Full reference history (at least as long as the secondary model).
    pub fn reference_history(&self) -> &[f64] {
        self.reference.as_slice()
    }

    pub fn secondary_model(&self) -> &FirPath {
        &self.secondary_model
    }

    /// Recompute the filtered window from the raw reference window and compare.
    pub fn is_consistent(&self, tol: f64) -> bool {
        let hist = self.reference.as_slice();
        let recomputed: Vec<f64> = (0..self.taps)
            .map(|k| self.secondary_model.apply(&hist[k..]))
            .collect();
        recomputed
            .iter()
            .zip(self.filtered())
            .all(|(a, b)| (a - b).abs() <= tol * (1.0 + a.abs()))
    }
}
