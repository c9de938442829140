//! Linear-Gaussian single-object tracking in clutter with nearest-neighbour
//! association, plus the closed-form reference model for the transformed
//! measurement likelihood.

mod association;
mod filter;
mod motion;
mod reference;
mod types;

pub use association::{associate_nn, transformed_likelihood_value};
pub use filter::{predict, update};
pub use motion::MotionModel;
pub use reference::{reference_coeffs, ReferenceModel, ReferenceWeighting};
pub use types::{InnovationData, MeasurementScan, SensorModel, TrackState};

pub use crate::stats::{chi2_cdf, chi2_quantile, generalized_factorial};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrackerError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("covariance is not symmetric positive definite")]
    NotPositiveDefinite,
    #[error("innovation covariance is singular")]
    SingularInnovation,
    #[error("association index {index} out of range for {count} measurements")]
    BadAssociation { index: usize, count: usize },
    #[error("invalid sensor model: {0}")]
    Sensor(String),
    #[error("gate probability {0} outside (0, 1)")]
    Gate(f64),
}
