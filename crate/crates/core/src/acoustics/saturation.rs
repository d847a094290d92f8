use serde::{Deserialize, Serialize};

use crate::error::{config_err, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClipMode {
    /// Clamp to `[-y_T, y_T]`.
    #[default]
    Symmetric,
    /// Clip only positive excursions, `min(y, y_T)`.
    UpperOnly,
}

/// Amplitude clipping of the secondary source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaturationModel {
    pub clip_threshold: f64,
    #[serde(default)]
    pub mode: ClipMode,
}

impl SaturationModel {
    pub fn new(clip_threshold: f64, mode: ClipMode) -> Result<Self> {
        let m = Self { clip_threshold, mode };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.clip_threshold.is_finite() && self.clip_threshold > 0.0) {
            return Err(config_err("clip_threshold must be finite and > 0"));
        }
        Ok(())
    }
}

#[inline]
pub fn saturate(y: f64, model: &SaturationModel) -> f64 {
    let t = model.clip_threshold;
    match model.mode {
        ClipMode::UpperOnly => y.min(t),
        ClipMode::Symmetric => y.clamp(-t, t),
    }
}
