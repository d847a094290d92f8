//! Adaptive control algorithms for output-constrained ANC.
//!
//! All four algorithms share the same state ([`ControllerState`]) and the
//! same per-sample input ([`StepInput`]). The constrained variants choose
//! between two gradient directions depending on whether the estimated output
//! power `Ê[y²]` exceeds the limit `ρ²`:
//!
//! ```text
//! Ê[y²] <= ρ² :  w += μ₁ e x'                 (2GD)
//!                ζ = κ ζ + μ₁ e x';  w += ζ    (2GD-momentum)
//! Ê[y²] >  ρ² :  w -= ς μ₁ y x;  μ₁ = max(γ μ₁, μ_min)
//! ```

mod config;
mod filtered_reference;
mod lagrangian;
mod state;
mod update;

pub use config::{Algorithm, AlgorithmConfig, MomentumOnSwitch, PowerEstimator, StepFloor, Varsigma};
pub use filtered_reference::FilteredReferenceState;
pub use lagrangian::lagrangian_factor;
pub use state::{estimate_output_power, Branch, ControllerState};
pub use update::{
    step_2gd, step_2gd_momentum, step_fxlms, step_rescaling, Controller, StepInput,
};
