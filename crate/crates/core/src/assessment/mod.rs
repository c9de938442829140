//! Four-aspect self-assessment on top of the tracker.
//!
//! Each (sensor, aspect) pair runs an [`AssessmentTrack`]: single-step
//! opinions feed a sliding short-term opinion and a discounted long-term
//! opinion, and the long-term opinion is compared with a dogmatic reference
//! through the degree of conflict and its dynamic threshold.

mod binning;
mod nis;
mod track;

pub use binning::{build_reference, build_references, observe_step, AspectBinning, ClutterBins, References};
pub use nis::{nis_confidence_interval, nis_time_average, NisStat, NisWindow};
pub use track::{AssessmentTrack, SAOutput, SaParams};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sl::SlError;
use crate::tracker::TrackerError;

/// The monitored aspects, in reporting order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aspect {
    Overall,
    Association,
    Measurement,
    Clutter,
}

impl Aspect {
    pub const ALL: [Aspect; 4] = [Aspect::Overall, Aspect::Association, Aspect::Measurement, Aspect::Clutter];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Short name used in metric keys (`dc_assoc`, `u_meas`, ...).
    pub fn short_name(self) -> &'static str {
        match self {
            Aspect::Overall => "overall",
            Aspect::Association => "assoc",
            Aspect::Measurement => "meas",
            Aspect::Clutter => "clutter",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AssessmentError {
    #[error("degenerate binning: {0}")]
    DegenerateBinning(String),
    #[error("invalid assessment parameter: {0}")]
    Param(String),
    #[error(transparent)]
    Sl(#[from] SlError),
    #[error(transparent)]
    Tracker(#[from] TrackerError),
}
