//! Closed-form predictions: correlation statistics, Wiener solutions,
//! step-size bounds and time constants.

mod boundary;
mod correlation;
mod decay;
pub mod linalg;
mod stability;
mod wiener;

pub use boundary::{constraint_boundary, output_power};
pub use correlation::{build_correlation_model, CorrelationModel};
pub use decay::decay_time;
pub use linalg::Matrix;
pub use stability::{stability_bounds, time_constant, StabilityReport};
pub use wiener::{wiener_optimal, wiener_suboptimal, CrossCorrelation, WienerSolution};

/// Largest condition number accepted by the Wiener solvers.
pub const MAX_CONDITION: f64 = 1e12;
