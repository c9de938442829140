use nalgebra::{DMatrix, DVector};

use super::TrackerError;

const SYMMETRY_TOL: f64 = 1e-9;

pub(crate) fn check_spd(m: &DMatrix<f64>) -> Result<(), TrackerError> {
    if !m.is_square() {
        return Err(TrackerError::Dimension(format!("{}x{} covariance", m.nrows(), m.ncols())));
    }
    if (m - m.transpose()).abs().max() > SYMMETRY_TOL {
        return Err(TrackerError::NotPositiveDefinite);
    }
    if m.clone().cholesky().is_none() {
        return Err(TrackerError::NotPositiveDefinite);
    }
    Ok(())
}

pub(crate) fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Gaussian state estimate at time step `time_step`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackState {
    pub mean: DVector<f64>,
    pub covariance: DMatrix<f64>,
    pub time_step: u64,
}

impl TrackState {
    pub fn new(mean: DVector<f64>, covariance: DMatrix<f64>, time_step: u64) -> Result<Self, TrackerError> {
        if covariance.nrows() != mean.len() {
            return Err(TrackerError::Dimension(format!(
                "mean of length {} with {}x{} covariance",
                mean.len(),
                covariance.nrows(),
                covariance.ncols()
            )));
        }
        check_spd(&covariance)?;
        Ok(Self { mean, covariance, time_step })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// All measurements one sensor reported in one time step.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementScan {
    pub points: Vec<DVector<f64>>,
    pub sensor_id: usize,
    pub time_step: u64,
}

impl MeasurementScan {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Assumed sensor characteristics used by the tracker and the reference model.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorModel {
    /// `p_D`
    pub detection_prob: f64,
    /// `λ̄_c`, expected clutter count per scan.
    pub clutter_mean: f64,
    /// `Vol(R)` of the field of view.
    pub fov_volume: f64,
    pub meas_noise_cov: DMatrix<f64>,
    pub meas_matrix: DMatrix<f64>,
}

impl SensorModel {
    /// Position-only sensor for a `[x, y, vx, vy]` state with isotropic noise.
    pub fn position_2d(detection_prob: f64, clutter_mean: f64, fov_volume: f64, noise_std: f64) -> Self {
        let mut h = DMatrix::zeros(2, 4);
        h[(0, 0)] = 1.0;
        h[(1, 1)] = 1.0;
        Self {
            detection_prob,
            clutter_mean,
            fov_volume,
            meas_noise_cov: DMatrix::identity(2, 2) * (noise_std * noise_std),
            meas_matrix: h,
        }
    }

    pub fn validate(&self) -> Result<(), TrackerError> {
        if !(0.0..=1.0).contains(&self.detection_prob) {
            return Err(TrackerError::Sensor(format!("detection probability {}", self.detection_prob)));
        }
        if !(self.clutter_mean >= 0.0) || !self.clutter_mean.is_finite() {
            return Err(TrackerError::Sensor(format!("clutter mean {}", self.clutter_mean)));
        }
        if !(self.fov_volume > 0.0) || !self.fov_volume.is_finite() {
            return Err(TrackerError::Sensor(format!("field-of-view volume {}", self.fov_volume)));
        }
        if self.meas_matrix.nrows() != self.meas_noise_cov.nrows() || self.meas_matrix.nrows() == 0 {
            return Err(TrackerError::Dimension("measurement matrix vs noise covariance".into()));
        }
        if self.meas_noise_cov.ncols() != self.meas_noise_cov.nrows()
            || (&self.meas_noise_cov - self.meas_noise_cov.transpose()).abs().max() > SYMMETRY_TOL
        {
            return Err(TrackerError::Sensor("measurement noise covariance must be symmetric".into()));
        }
        Ok(())
    }

    /// Measurement dimension `m_z`.
    pub fn meas_dim(&self) -> usize {
        self.meas_matrix.nrows()
    }

    /// Spatial clutter density `λ_c = λ̄_c / Vol(R)`.
    pub fn clutter_density(&self) -> f64 {
        self.clutter_mean / self.fov_volume
    }
}

/// Residuals and statistical distances of one scan against a predicted
/// density, plus the nearest-neighbour decision.
#[derive(Debug, Clone, PartialEq)]
pub struct InnovationData {
    pub predicted_meas: DVector<f64>,
    pub innovation_cov: DMatrix<f64>,
    pub residuals: Vec<DVector<f64>>,
    pub mahalanobis_sq: Vec<f64>,
    /// 1-based index of the associated measurement; 0 encodes a missed
    /// detection.
    pub assoc_index: usize,
}

impl InnovationData {
    pub fn is_missed(&self) -> bool {
        self.assoc_index == 0
    }

    /// Number of measurements in the scan that produced this data.
    pub fn scan_len(&self) -> usize {
        self.residuals.len()
    }
}
