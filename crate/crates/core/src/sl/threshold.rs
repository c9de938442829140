//! Dynamic threshold for the degree of conflict.
//!
//! With the confidence half-width
//! `d(α) = Φ⁻¹(1 − (1 − α)/(2W)) · √(W − 1) / (W · √n)` around each
//! reference probability, the threshold is the conflict between a dogmatic
//! reference and an opinion carrying `n` units of evidence that sits exactly
//! `d` away in every component:
//!
//! `η(α) = ½ · W · d(α) · (1 − W/(W + n))`.

use super::SlError;
use crate::stats::inverse_normal_cdf;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdParams {
    /// Requested error probability, strictly inside (0, 1).
    pub alpha: f64,
    /// Domain cardinality `W ≥ 2`.
    pub cardinality: usize,
    /// Amount of evidence `n_s` of the evidence-based opinion.
    pub sample_size: f64,
}

impl ThresholdParams {
    pub fn new(alpha: f64, cardinality: usize, sample_size: f64) -> Result<Self, SlError> {
        let p = Self { alpha, cardinality, sample_size };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<(), SlError> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(SlError::Threshold(format!("alpha {} outside (0, 1)", self.alpha)));
        }
        if self.cardinality < 2 {
            return Err(SlError::Cardinality(self.cardinality));
        }
        if !(self.sample_size >= 0.0) || !self.sample_size.is_finite() {
            return Err(SlError::Threshold(format!("sample size {} must be finite and >= 0", self.sample_size)));
        }
        Ok(())
    }
}

/// `Φ⁻¹(1 − (1 − α)/(2W)) · √(W − 1) / W`, i.e. `√(d²·n_s)`.
///
/// Depends only on `α` and `W`, so callers on a hot path can cache it and
/// use [`threshold_from_scale`].
pub fn half_width_scale(alpha: f64, cardinality: usize) -> Result<f64, SlError> {
    ThresholdParams::new(alpha, cardinality, 0.0)?;
    let w = cardinality as f64;
    let z = inverse_normal_cdf(1.0 - (1.0 - alpha) / (2.0 * w)).map_err(|e| SlError::Threshold(e.to_string()))?;
    Ok(z * (w - 1.0).sqrt() / w)
}

/// Confidence half-width `d(α)` for `n` samples.
pub fn confidence_half_width(p: &ThresholdParams) -> Result<f64, SlError> {
    let scale = half_width_scale(p.alpha, p.cardinality)?;
    Ok(scale / p.sample_size.sqrt())
}

/// `η` from a cached [`half_width_scale`].
pub fn threshold_from_scale(scale: f64, cardinality: usize, sample_size: f64) -> f64 {
    if sample_size <= 0.0 {
        return 0.0;
    }
    let w = cardinality as f64;
    0.5 * w * (scale / sample_size.sqrt()) * (1.0 - w / (w + sample_size))
}

/// Threshold `η(α)` above which the degree of conflict signals a violated
/// reference. The `n_s → 0` limit is 0.
pub fn dc_threshold(p: &ThresholdParams) -> Result<f64, SlError> {
    p.validate()?;
    let scale = half_width_scale(p.alpha, p.cardinality)?;
    Ok(threshold_from_scale(scale, p.cardinality, p.sample_size))
}
