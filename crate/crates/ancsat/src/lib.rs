//! Experiment runner for output-constrained ANC simulations.
//!
//! Builds on [`ancsat_core`] with spectral estimation, the CSV/JSON output
//! formats, experiment presets and the `ancsat` command line.

mod error;
pub mod experiment;
pub mod persist;
pub mod presets;
pub mod spectrum;

pub use error::{Error, Result};
