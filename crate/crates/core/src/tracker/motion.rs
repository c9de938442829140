use nalgebra::DMatrix;

use super::types::check_spd;
use super::TrackerError;

/// Linear motion model `x_{k+1} = F x_k + w`, `w ~ N(0, Q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionModel {
    pub transition: DMatrix<f64>,
    pub process_noise: DMatrix<f64>,
}

impl MotionModel {
    pub fn new(transition: DMatrix<f64>, process_noise: DMatrix<f64>) -> Result<Self, TrackerError> {
        if !transition.is_square() || transition.shape() != process_noise.shape() {
            return Err(TrackerError::Dimension("transition and process noise shapes differ".into()));
        }
        Ok(Self { transition, process_noise })
    }

    /// 2-D constant velocity over `[x, y, vx, vy]` driven by continuous white
    /// acceleration with spectral density `q` (m²/s³).
    pub fn constant_velocity_2d(dt: f64, q: f64) -> Self {
        let mut f = DMatrix::identity(4, 4);
        f[(0, 2)] = dt;
        f[(1, 3)] = dt;
        let (dt2, dt3) = (dt * dt, dt * dt * dt);
        let mut qm = DMatrix::zeros(4, 4);
        for axis in 0..2 {
            let (p, v) = (axis, axis + 2);
            qm[(p, p)] = q * dt3 / 3.0;
            qm[(p, v)] = q * dt2 / 2.0;
            qm[(v, p)] = q * dt2 / 2.0;
            qm[(v, v)] = q * dt;
        }
        Self { transition: f, process_noise: qm }
    }

    pub fn dim(&self) -> usize {
        self.transition.nrows()
    }

    /// Checks that `Q` is a valid covariance (zero is allowed).
    pub fn validate(&self) -> Result<(), TrackerError> {
        if self.process_noise.iter().all(|v| *v == 0.0) {
            return Ok(());
        }
        let n = self.dim();
        // positive semi-definite: Q + εI must factor
        check_spd(&(&self.process_noise + DMatrix::identity(n, n) * 1e-12))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cv_noise_is_valid() {
        let m = MotionModel::constant_velocity_2d(1.0, 0.5);
        assert!(m.validate().is_ok());
        assert_eq!(m.process_noise[(0, 0)], 0.5 / 3.0);
        assert_eq!(m.process_noise[(0, 2)], 0.25);
        assert_eq!(m.process_noise[(3, 3)], 0.5);
    }
}
