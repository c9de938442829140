use nalgebra::DMatrix;

use super::types::{check_spd, symmetrize};
use super::{InnovationData, MotionModel, SensorModel, TrackState, TrackerError};

/// Kalman prediction one step ahead.
pub fn predict(state: &TrackState, motion: &MotionModel) -> Result<TrackState, TrackerError> {
    if motion.dim() != state.dim() {
        return Err(TrackerError::Dimension(format!(
            "state of dimension {} with a {}-dimensional motion model",
            state.dim(),
            motion.dim()
        )));
    }
    let f = &motion.transition;
    let mean = f * &state.mean;
    let covariance = symmetrize(&(f * &state.covariance * f.transpose() + &motion.process_noise));
    check_spd(&covariance)?;
    Ok(TrackState { mean, covariance, time_step: state.time_step + 1 })
}

/// Kalman update with the associated measurement; a missed detection leaves
/// the state unchanged.
///
/// Uses the Joseph form so the posterior stays symmetric positive definite
/// even with a near-singular measurement noise.
pub fn update(state: &TrackState, innov: &InnovationData, sensor: &SensorModel) -> Result<TrackState, TrackerError> {
    if innov.assoc_index == 0 {
        return Ok(state.clone());
    }
    let count = innov.residuals.len();
    if innov.assoc_index > count {
        return Err(TrackerError::BadAssociation { index: innov.assoc_index, count });
    }
    let h = &sensor.meas_matrix;
    if h.ncols() != state.dim() {
        return Err(TrackerError::Dimension("measurement matrix does not match the state".into()));
    }
    let residual = &innov.residuals[innov.assoc_index - 1];
    let s_inv = innov.innovation_cov.clone().cholesky().ok_or(TrackerError::SingularInnovation)?.inverse();
    let gain = &state.covariance * h.transpose() * s_inv;

    let mean = &state.mean + &gain * residual;
    let n = state.dim();
    let i_kh = DMatrix::identity(n, n) - &gain * h;
    let joseph = &i_kh * &state.covariance * i_kh.transpose() + &gain * &sensor.meas_noise_cov * gain.transpose();
    let covariance = symmetrize(&joseph);
    Ok(TrackState { mean, covariance, time_step: state.time_step })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tracker::associate_nn;
    use crate::tracker::MeasurementScan;
    use approx::assert_relative_eq;
    use nalgebra::DVector;

    fn scalar_sensor(r: f64) -> SensorModel {
        SensorModel {
            detection_prob: 1.0,
            clutter_mean: 0.0,
            fov_volume: 1.0,
            meas_noise_cov: DMatrix::from_element(1, 1, r),
            meas_matrix: DMatrix::from_element(1, 1, 1.0),
        }
    }

    #[test]
    fn identity_dynamics_without_noise() {
        let s = TrackState::new(DVector::from_vec(vec![1.0, 2.0]), DMatrix::identity(2, 2), 3).unwrap();
        let m = MotionModel::new(DMatrix::identity(2, 2), DMatrix::zeros(2, 2)).unwrap();
        let p = predict(&s, &m).unwrap();
        assert_eq!(p.mean, s.mean);
        assert_eq!(p.covariance, s.covariance);
        assert_eq!(p.time_step, 4);
    }

    #[test]
    fn constant_velocity_moves_position() {
        let s = TrackState::new(DVector::from_vec(vec![1.0, -2.0, 3.0, 0.5]), DMatrix::identity(4, 4), 0).unwrap();
        let p = predict(&s, &MotionModel::constant_velocity_2d(1.0, 0.0)).unwrap();
        assert_eq!(p.mean.as_slice(), &[4.0, -1.5, 3.0, 0.5]);
    }

    #[test]
    fn prediction_trace_matches_hand_arithmetic() {
        // P = diag(1, 2, 0.5, 0.25); F P Fᵀ adds P_vv to each position term.
        let p0 = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0, 0.5, 0.25]));
        let s = TrackState::new(DVector::zeros(4), p0, 0).unwrap();
        let q = 0.3;
        let p = predict(&s, &MotionModel::constant_velocity_2d(1.0, q)).unwrap();
        let expected_trace = (1.0 + 0.5) + (2.0 + 0.25) + 0.5 + 0.25 + 2.0 * (q / 3.0 + q);
        assert_relative_eq!(p.covariance.trace(), expected_trace, epsilon = 1e-12);
        assert!(p.covariance.trace() > s.covariance.trace());
    }

    #[test]
    fn scalar_gain_is_half() {
        let s = TrackState::new(DVector::from_element(1, 0.0), DMatrix::identity(1, 1), 0).unwrap();
        let sensor = scalar_sensor(1.0);
        let scan = MeasurementScan { points: vec![DVector::from_element(1, 2.0)], sensor_id: 1, time_step: 0 };
        let innov = associate_nn(&s, &scan, &sensor, 0.999).unwrap();
        assert_eq!(innov.assoc_index, 1);
        let post = update(&s, &innov, &sensor).unwrap();
        // K = 0.5, so mean = 0.5·2 and variance = (1 − K)·P
        assert_relative_eq!(post.mean[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(post.covariance[(0, 0)], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn missed_detection_is_identity() {
        let s = TrackState::new(DVector::from_element(1, 0.0), DMatrix::identity(1, 1), 0).unwrap();
        let sensor = scalar_sensor(1.0);
        let scan = MeasurementScan { points: vec![], sensor_id: 1, time_step: 0 };
        let innov = associate_nn(&s, &scan, &sensor, 0.99).unwrap();
        assert_eq!(update(&s, &innov, &sensor).unwrap(), s);
    }

    #[test]
    fn noiseless_measurement_pins_position() {
        let s = TrackState::new(DVector::from_vec(vec![0.0, 0.0, 1.0, 1.0]), DMatrix::identity(4, 4) * 2.0, 0).unwrap();
        let mut sensor = SensorModel::position_2d(1.0, 1.0, 100.0, 0.0);
        sensor.meas_noise_cov = DMatrix::zeros(2, 2);
        let z = DVector::from_vec(vec![0.7, -0.4]);
        let scan = MeasurementScan { points: vec![z.clone()], sensor_id: 1, time_step: 0 };
        let innov = associate_nn(&s, &scan, &sensor, 0.99).unwrap();
        let post = update(&s, &innov, &sensor).unwrap();
        assert_relative_eq!(post.mean[0], z[0], epsilon = 1e-12);
        assert_relative_eq!(post.mean[1], z[1], epsilon = 1e-12);
    }

    #[test]
    fn bad_association_rejected() {
        let s = TrackState::new(DVector::from_element(1, 0.0), DMatrix::identity(1, 1), 0).unwrap();
        let sensor = scalar_sensor(1.0);
        let scan = MeasurementScan { points: vec![DVector::from_element(1, 0.1)], sensor_id: 1, time_step: 0 };
        let mut innov = associate_nn(&s, &scan, &sensor, 0.99).unwrap();
        innov.assoc_index = 5;
        assert!(matches!(update(&s, &innov, &sensor), Err(TrackerError::BadAssociation { .. })));
    }
}
