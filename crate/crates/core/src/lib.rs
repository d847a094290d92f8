//! Simulation and analysis of output-constrained active noise control.
//!
//! The crate is `no_std` (it needs `alloc`) and holds everything that is pure
//! computation:
//!
//! - [`acoustics`]: FIR acoustic paths, loudspeaker clipping and seeded noise.
//! - [`controllers`]: FXLMS, rescaling, two-gradient-direction (2GD) and
//!   momentum 2GD with variable step size.
//! - [`analysis`]: correlation statistics, Wiener solutions, step-size bounds
//!   and time constants.
//! - [`harness`]: the sample loop that wires paths and controllers together and
//!   records trajectories.
//!
//! File formats, spectral estimation and the command line live in the `ancsat`
//! crate.
#![no_std]
// `!(x > 0.0)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod acoustics;
pub mod analysis;
pub mod controllers;
mod error;
pub mod harness;
pub(crate) mod math;

pub use error::{Error, Result};
