use super::{InnovationData, MeasurementScan, SensorModel, TrackState, TrackerError};
use crate::stats::chi2_quantile;

/// Nearest-neighbour association inside a χ² gate.
///
/// Computes the residual and squared Mahalanobis distance of every
/// measurement against the predicted measurement, then picks the smallest
/// distance that falls inside the `gate_prob` quantile of `χ²_{m_z}`. Ties go
/// to the lowest measurement index. An empty scan or an empty gate yields a
/// missed detection (`assoc_index == 0`).
pub fn associate_nn(
    pred: &TrackState,
    scan: &MeasurementScan,
    sensor: &SensorModel,
    gate_prob: f64,
) -> Result<InnovationData, TrackerError> {
    if !(gate_prob > 0.0 && gate_prob < 1.0) {
        return Err(TrackerError::Gate(gate_prob));
    }
    let h = &sensor.meas_matrix;
    if h.ncols() != pred.dim() {
        return Err(TrackerError::Dimension("measurement matrix does not match the state".into()));
    }
    let m_z = sensor.meas_dim();
    let predicted_meas = h * &pred.mean;
    let innovation_cov = {
        let s = h * &pred.covariance * h.transpose() + &sensor.meas_noise_cov;
        (&s + s.transpose()) * 0.5
    };
    let chol = innovation_cov.clone().cholesky().ok_or(TrackerError::SingularInnovation)?;
    let gate = chi2_quantile(gate_prob, m_z as u32).map_err(|_| TrackerError::Gate(gate_prob))?;

    let mut residuals = Vec::with_capacity(scan.len());
    let mut mahalanobis_sq = Vec::with_capacity(scan.len());
    let mut best: Option<(usize, f64)> = None;
    for (i, z) in scan.points.iter().enumerate() {
        if z.len() != m_z {
            return Err(TrackerError::Dimension(format!("measurement of length {} for m_z = {m_z}", z.len())));
        }
        let gamma = z - &predicted_meas;
        let d2 = gamma.dot(&chol.solve(&gamma)).max(0.0);
        if d2 <= gate && best.is_none_or(|(_, b)| d2 < b) {
            best = Some((i + 1, d2));
        }
        residuals.push(gamma);
        mahalanobis_sq.push(d2);
    }

    Ok(InnovationData {
        predicted_meas,
        innovation_cov,
        residuals,
        mahalanobis_sq,
        assoc_index: best.map_or(0, |(i, _)| i),
    })
}

/// `z̃` of the associated measurement, `None` on a missed detection.
pub fn transformed_likelihood_value(innov: &InnovationData) -> Option<f64> {
    match innov.assoc_index {
        0 => None,
        i => innov.mahalanobis_sq.get(i - 1).copied(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::{DMatrix, DVector};

    fn setup() -> (TrackState, SensorModel) {
        // S = HPHᵀ + R = I with P_pos = 0.5 I and R = 0.5 I
        let mut p = DMatrix::identity(4, 4);
        p[(0, 0)] = 0.5;
        p[(1, 1)] = 0.5;
        let state = TrackState::new(DVector::zeros(4), p, 0).unwrap();
        let sensor = SensorModel::position_2d(0.9, 4.0, 100.0, 0.5_f64.sqrt());
        (state, sensor)
    }

    fn scan(points: &[[f64; 2]]) -> MeasurementScan {
        MeasurementScan {
            points: points.iter().map(|p| DVector::from_row_slice(p)).collect(),
            sensor_id: 1,
            time_step: 0,
        }
    }

    #[test]
    fn empty_scan_is_missed() {
        let (s, sensor) = setup();
        let innov = associate_nn(&s, &scan(&[]), &sensor, 0.99).unwrap();
        assert_eq!(innov.assoc_index, 0);
        assert_eq!(transformed_likelihood_value(&innov), None);
    }

    #[test]
    fn exact_hit() {
        let (s, sensor) = setup();
        let innov = associate_nn(&s, &scan(&[[0.0, 0.0]]), &sensor, 0.99).unwrap();
        assert_eq!(innov.assoc_index, 1);
        assert_eq!(transformed_likelihood_value(&innov), Some(0.0));
    }

    #[test]
    fn nearest_inside_gate_wins() {
        let (s, sensor) = setup();
        // z̃ = 3 and z̃ = 1 with S = I
        let innov = associate_nn(&s, &scan(&[[3.0_f64.sqrt(), 0.0], [0.0, 1.0]]), &sensor, 0.99).unwrap();
        assert_relative_eq!(innov.mahalanobis_sq[0], 3.0, epsilon = 1e-12);
        assert_relative_eq!(innov.mahalanobis_sq[1], 1.0, epsilon = 1e-12);
        // exhaustive argmin over the gated candidates
        let gate = chi2_quantile(0.99, 2).unwrap();
        let expected = innov
            .mahalanobis_sq
            .iter()
            .enumerate()
            .filter(|(_, d)| **d <= gate)
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, _)| i + 1)
            .unwrap();
        assert_eq!(innov.assoc_index, expected);
        assert_eq!(innov.assoc_index, 2);
    }

    #[test]
    fn outside_gate_is_missed() {
        let (s, sensor) = setup();
        let innov = associate_nn(&s, &scan(&[[10.0, 0.0]]), &sensor, 0.99).unwrap();
        assert_eq!(innov.assoc_index, 0);
        assert_relative_eq!(innov.mahalanobis_sq[0], 100.0, epsilon = 1e-9);
    }

    #[test]
    fn tie_goes_to_lowest_index() {
        let (s, sensor) = setup();
        let innov = associate_nn(&s, &scan(&[[5.0, 5.0], [1.0, 0.0], [0.0, 1.0]]), &sensor, 0.99).unwrap();
        assert_eq!(innov.assoc_index, 2);
    }

    #[test]
    fn quadratic_form_with_diagonal_s() {
        // S = diag(1, 4): P_pos = diag(0.5, 3.5), R = 0.5 I
        let mut p = DMatrix::identity(4, 4);
        p[(0, 0)] = 0.5;
        p[(1, 1)] = 3.5;
        let state = TrackState::new(DVector::zeros(4), p, 0).unwrap();
        let sensor = SensorModel::position_2d(0.9, 4.0, 100.0, 0.5_f64.sqrt());
        let innov = associate_nn(&state, &scan(&[[1.0, 2.0]]), &sensor, 0.99).unwrap();
        assert_relative_eq!(transformed_likelihood_value(&innov).unwrap(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn bad_gate_rejected() {
        let (s, sensor) = setup();
        assert!(associate_nn(&s, &scan(&[]), &sensor, 1.0).is_err());
    }
}
