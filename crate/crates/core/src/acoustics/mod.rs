//! Acoustic plant: FIR paths, loudspeaker saturation and noise sources.

mod fir;
mod noise;
mod saturation;

pub use fir::{convolve, DelayLine, FirPath};
pub use noise::{bandpass_fir, generate, NoiseKind, NoiseSource, BANDPASS_ORDER};
pub use saturation::{saturate, ClipMode, SaturationModel};
