//! Reference distribution of the transformed measurement likelihood.
//!
//! Under the nominal assumptions the transformed measurement `z̃` follows
//! `c̃₀ + c̃₁·χ²_{m_z}` with the expected scan size `E[m_k] = λ̄_c + p_D`
//! substituted into the single-step coefficients:
//!
//! ```text
//! c̃₀ = (1 − p_D) · e^{−λ̄_c} · λ_c^{E}     / E!
//! c̃₁ =      p_D  · e^{−λ̄_c} · λ_c^{E − 1} · E / E!
//! ```
//!
//! where `E! = Γ(E + 1)`.

use serde::{Deserialize, Serialize};

use super::{SensorModel, TrackerError};
use crate::stats::generalized_factorial;

/// How the two coefficients are turned into event probabilities for the
/// "no association" / "association" split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceWeighting {
    /// Compare `c̃₀` with `c̃₁·λ_c / E[m_k]`: both hypotheses then carry the
    /// same Poisson clutter factor, which cancels and leaves `(1 − p_D, p_D)`.
    #[default]
    PerHypothesis,
    /// Normalize `c̃₀` and `c̃₁` directly. `c̃₁` carries an extra
    /// `E[m_k]/λ_c` that depends on the unit of the field-of-view volume.
    Verbatim,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceModel {
    pub c0_tilde: f64,
    pub c1_tilde: f64,
    pub meas_dim: usize,
    /// `c̃₀ + c̃₁` (the χ² part integrates to one over its support).
    pub normalizer: f64,
    pub detection_prob: f64,
    pub clutter_density: f64,
    pub expected_count: f64,
}

impl ReferenceModel {
    /// Probabilities of (missed detection, detection) under `weighting`.
    pub fn event_weights(&self, weighting: ReferenceWeighting) -> Result<(f64, f64), TrackerError> {
        match weighting {
            ReferenceWeighting::PerHypothesis => Ok((1.0 - self.detection_prob, self.detection_prob)),
            ReferenceWeighting::Verbatim => {
                if !(self.normalizer > 0.0) || !self.normalizer.is_finite() {
                    return Err(TrackerError::Sensor(format!(
                        "reference coefficients cannot be normalized (c0 + c1 = {})",
                        self.normalizer
                    )));
                }
                Ok((self.c0_tilde / self.normalizer, self.c1_tilde / self.normalizer))
            }
        }
    }
}

/// Closed-form reference coefficients for `sensor`.
///
/// `λ̄_c = 0` is accepted only where the limit exists (`p_D ∈ {0, 1}`); the
/// NIS corner case `p_D = 1` gives `(c̃₀, c̃₁) = (0, 1)` exactly.
pub fn reference_coeffs(sensor: &SensorModel) -> Result<ReferenceModel, TrackerError> {
    sensor.validate()?;
    let p_d = sensor.detection_prob;
    let mean = sensor.clutter_mean;
    let density = sensor.clutter_density();
    let expected = mean + p_d;

    let (c0, c1) = if mean == 0.0 {
        if p_d == 1.0 {
            (0.0, 1.0)
        } else if p_d == 0.0 {
            (1.0, 0.0)
        } else {
            return Err(TrackerError::Sensor(format!("clutter-free limit diverges for detection probability {p_d}")));
        }
    } else {
        let fact = generalized_factorial(expected).map_err(|e| TrackerError::Sensor(e.to_string()))?;
        let poisson = (-mean).exp() / fact;
        let c0 = (1.0 - p_d) * poisson * density.powf(expected);
        let c1 = p_d * poisson * density.powf(expected - 1.0) * expected;
        (c0, c1)
    };

    Ok(ReferenceModel {
        c0_tilde: c0,
        c1_tilde: c1,
        meas_dim: sensor.meas_dim(),
        normalizer: c0 + c1,
        detection_prob: p_d,
        clutter_density: density,
        expected_count: expected,
    })
}
