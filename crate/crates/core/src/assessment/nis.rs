//! Time-average normalized innovation squared, the classical baseline.

use std::collections::VecDeque;

use super::AssessmentError;
use crate::stats::chi2_quantile;

/// Average NIS over `samples` values with its two-sided confidence interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NisStat {
    pub mean: f64,
    pub lower: f64,
    pub upper: f64,
    pub samples: usize,
}

impl NisStat {
    pub fn inside(&self) -> bool {
        self.mean >= self.lower && self.mean <= self.upper
    }
}

/// Two-sided `conf` interval of the mean of `samples` independent
/// `χ²_{m_z}` values: `[χ²_{K·m_z}((1−conf)/2), χ²_{K·m_z}((1+conf)/2)] / K`.
pub fn nis_confidence_interval(samples: usize, meas_dim: usize, conf: f64) -> Result<(f64, f64), AssessmentError> {
    if samples == 0 || meas_dim == 0 {
        return Err(AssessmentError::Param("NIS interval needs at least one sample".into()));
    }
    if !(conf > 0.0 && conf < 1.0) {
        return Err(AssessmentError::Param(format!("NIS confidence {conf} outside (0, 1)")));
    }
    let dof = u32::try_from(samples * meas_dim).map_err(|_| AssessmentError::Param("too many NIS samples".into()))?;
    let k = samples as f64;
    let q = |p: f64| chi2_quantile(p, dof).map_err(|e| AssessmentError::Param(e.to_string()));
    Ok((q(0.5 * (1.0 - conf))? / k, q(0.5 * (1.0 + conf))? / k))
}

/// Average over the `window` most recent steps of `history`; `None` entries
/// (missed detections) are skipped. `Ok(None)` if no value is left.
pub fn nis_time_average(
    history: &[Option<f64>],
    window: usize,
    meas_dim: usize,
    conf: f64,
) -> Result<Option<NisStat>, AssessmentError> {
    if window == 0 {
        return Err(AssessmentError::Param("NIS window must be at least 1".into()));
    }
    let start = history.len().saturating_sub(window);
    let values: Vec<f64> = history[start..].iter().flatten().copied().collect();
    if values.is_empty() {
        return Ok(None);
    }
    let (lower, upper) = nis_confidence_interval(values.len(), meas_dim, conf)?;
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    Ok(Some(NisStat { mean, lower, upper, samples: values.len() }))
}

/// Streaming form of [`nis_time_average`] with cached intervals.
#[derive(Debug, Clone)]
pub struct NisWindow {
    window: usize,
    meas_dim: usize,
    conf: f64,
    buf: VecDeque<Option<f64>>,
    intervals: Vec<Option<(f64, f64)>>,
}

impl NisWindow {
    pub fn new(window: usize, meas_dim: usize, conf: f64) -> Result<Self, AssessmentError> {
        if window == 0 {
            return Err(AssessmentError::Param("NIS window must be at least 1".into()));
        }
        nis_confidence_interval(1, meas_dim, conf)?;
        Ok(Self { window, meas_dim, conf, buf: VecDeque::with_capacity(window + 1), intervals: vec![None; window + 1] })
    }

    /// Pushes one step (`None` on a missed detection) and returns the
    /// current average.
    pub fn push(&mut self, z: Option<f64>) -> Result<Option<NisStat>, AssessmentError> {
        self.buf.push_back(z);
        if self.buf.len() > self.window {
            self.buf.pop_front();
        }
        // summing in window order keeps the result identical to the batch form
        let (sum, k) = self.buf.iter().flatten().fold((0.0, 0usize), |(s, k), v| (s + v, k + 1));
        if k == 0 {
            return Ok(None);
        }
        let (lower, upper) = match self.intervals[k] {
            Some(ci) => ci,
            None => {
                let ci = nis_confidence_interval(k, self.meas_dim, self.conf)?;
                self.intervals[k] = Some(ci);
                ci
            }
        };
        Ok(Some(NisStat { mean: sum / k as f64, lower, upper, samples: k }))
    }
}
