//! Subjective-logic opinion algebra over finite domains.
//!
//! Opinions are plain values; every operator returns a new opinion. The
//! evidence mapping uses a Dirichlet prior weight equal to the domain
//! cardinality `W`, which is what the conflict threshold in [`threshold`]
//! assumes.

mod opinion;
mod ops;
pub mod threshold;

pub use opinion::{EvidenceVector, Opinion};
pub use ops::{degree_of_conflict, fuse_acbf, projected_distance, trust_discount, unfuse};
pub use threshold::{dc_threshold, ThresholdParams};

use thiserror::Error;

/// Tolerance for the additivity constraints `Σb + u = 1` and `Σa = 1`.
pub const ADDITIVITY_TOL: f64 = 1e-9;

/// Negative beliefs above this value are treated as round-off and clamped.
pub const NEGATIVE_BELIEF_FLOOR: f64 = -1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SlError {
    #[error("domain cardinality must be at least 2, got {0}")]
    Cardinality(usize),
    #[error("domain mismatch: cardinality {left} vs {right}")]
    DomainMismatch { left: usize, right: usize },
    #[error("invalid opinion: {0}")]
    Invalid(String),
    #[error("unfusion denominator is degenerate")]
    DegenerateUnfusion,
    #[error("unfusion would produce negative belief {0}")]
    NegativeBelief(f64),
    #[error("a dogmatic opinion carries infinite evidence")]
    DogmaticEvidence,
    #[error("discount probability {0} outside [0, 1]")]
    DiscountOutOfRange(f64),
    #[error("threshold parameter: {0}")]
    Threshold(String),
}
