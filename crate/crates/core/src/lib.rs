//! Self-assessing single-object tracking in clutter.
//!
//! [`sl`] holds the subjective-logic opinion algebra and the conflict
//! threshold. [`tracker`] is a Kalman filter with nearest-neighbour
//! association and the closed-form reference coefficients. [`assessment`]
//! runs the overall, association, measurement and clutter monitors of one
//! sensor, plus the time-average NIS baseline. [`harness`] simulates
//! scenarios, runs Monte-Carlo studies and writes CSV/SVG.

// `!(x > 0.0)` deliberately rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assessment;
pub mod harness;
pub mod sl;
pub mod stats;
pub mod tracker;
