//! Scenario generation, Monte-Carlo execution, configuration and export.
//!
//! A run simulates one object moving with constant velocity in front of
//! several position sensors with Poisson clutter, tracks it with a Kalman
//! filter, and feeds every sensor's association outcome to the four
//! self-assessment aspects. Disturbances change the simulated sensors only;
//! the tracker keeps its nominal models.

mod config;
mod output;
mod run;
mod scenario;

pub use config::{
    parse_config, parse_config_str, preset, Disturbance, DisturbanceKind, Fov, FovMode, ScenarioConfig, SensorOverride,
    SensorParams, PRESETS,
};
pub use output::{csv_string, format_g6, parse_csv, svg_string, write_csv, write_svg};
pub use run::{
    run_monte_carlo, run_once, Metric, MonteCarloOutput, RunOutput, RunRecord, RunSummary, RunWarning, ScoreTable,
};
pub use scenario::{generate_scenario, run_seed, Scenario, SensorScan};

use std::path::Path;

use thiserror::Error;

use crate::assessment::AssessmentError;
use crate::tracker::TrackerError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Assessment(#[from] AssessmentError),
    #[error(transparent)]
    Tracker(#[from] TrackerError),
}

/// Writes `scores.csv`, `config_resolved.txt` and, with `svg`, one
/// `scores_<sensor>.svg` per sensor into `dir`.
pub fn write_outputs(cfg: &ScenarioConfig, out: &MonteCarloOutput, dir: &Path, svg: bool) -> Result<(), HarnessError> {
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::Io(format!("{}: {e}", dir.display())))?;
    write_csv(&out.averaged, &dir.join("scores.csv"))?;
    let resolved = dir.join("config_resolved.txt");
    std::fs::write(&resolved, cfg.resolved_text()?)
        .map_err(|e| HarnessError::Io(format!("{}: {e}", resolved.display())))?;
    if svg {
        for s in 1..=cfg.num_sensors {
            write_svg(&out.averaged, s, &cfg.disturbance, &dir.join(format!("scores_{s}.svg")))?;
        }
    }
    Ok(())
}
