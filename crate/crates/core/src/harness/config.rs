use std::path::Path;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::assessment::SaParams;
use crate::tracker::{MotionModel, ReferenceWeighting, SensorModel};

const PAPER_SCENARIO: &str = include_str!("../../presets/paper_scenario.toml");
const NOMINAL: &str = include_str!("../../presets/nominal.toml");

/// Names accepted by [`preset`].
pub const PRESETS: [&str; 2] = ["paper_scenario", "nominal"];

/// Parameter change applied to the true sensor inside `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisturbanceKind {
    /// Multiplies the measurement noise standard deviation.
    NoiseScale,
    /// Multiplies the expected clutter count.
    ClutterScale,
    /// Replaces the detection probability.
    PdSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Disturbance {
    /// 1-based sensor id.
    pub sensor: usize,
    pub start: u64,
    /// Exclusive.
    pub end: u64,
    pub kind: DisturbanceKind,
    pub value: f64,
}

impl Disturbance {
    pub fn active(&self, sensor: usize, step: u64) -> bool {
        self.sensor == sensor && (self.start..self.end).contains(&step)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FovMode {
    /// The rectangle is centred on the object every step.
    #[default]
    FollowObject,
    /// The rectangle is centred on the origin.
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fov {
    pub width: f64,
    pub height: f64,
    pub mode: FovMode,
}

impl Default for Fov {
    fn default() -> Self {
        Self { width: 200.0, height: 100.0, mode: FovMode::FollowObject }
    }
}

impl Fov {
    pub fn volume(&self) -> f64 {
        self.width * self.height
    }
}

/// Position-sensor parameters in physical units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensorParams {
    pub detection_prob: f64,
    pub clutter_mean: f64,
    /// Standard deviation of the position noise per axis, metres.
    pub noise_std: f64,
}

impl Default for SensorParams {
    fn default() -> Self {
        Self { detection_prob: 0.9, clutter_mean: 4.0, noise_std: 0.75 }
    }
}

/// Per-sensor deviation from the shared `[sensor]` table. The plain fields
/// change both the assumed and the true model; the `true_` fields only the
/// simulated one.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorOverride {
    pub id: usize,
    pub detection_prob: Option<f64>,
    pub clutter_mean: Option<f64>,
    pub noise_std: Option<f64>,
    pub true_detection_prob: Option<f64>,
    pub true_clutter_mean: Option<f64>,
    pub true_noise_std: Option<f64>,
}

/// Everything a simulation run depends on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub num_steps: u64,
    /// Sampling period, seconds.
    pub dt: f64,
    pub num_sensors: usize,
    pub mc_runs: usize,
    pub seed: u64,
    /// Spectral density `q` of the white acceleration, m²/s³ (truth and filter).
    pub process_noise: f64,
    /// Mean initial velocity `[vx, vy]`, m/s (truth and prior).
    pub init_velocity: [f64; 2],
    /// Standard deviation of the initial velocity per axis, m/s (truth and prior).
    pub init_velocity_std: f64,
    /// Consecutive steps without association after which a divergence is logged.
    pub divergence_steps: u64,
    /// Position variance (m²) beyond which a covariance blow-up is logged.
    pub divergence_variance: f64,
    pub reference_weighting: ReferenceWeighting,
    pub fov: Fov,
    pub sensor: SensorParams,
    pub sensor_override: Vec<SensorOverride>,
    pub sa: SaParams,
    pub disturbance: Vec<Disturbance>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            num_steps: 600,
            dt: 1.0,
            num_sensors: 3,
            mc_runs: 200,
            seed: 2,
            process_noise: 0.01,
            init_velocity: [5.0, 0.0],
            init_velocity_std: 1.0,
            divergence_steps: 20,
            divergence_variance: 1.0e4,
            reference_weighting: ReferenceWeighting::PerHypothesis,
            fov: Fov::default(),
            sensor: SensorParams::default(),
            sensor_override: Vec::new(),
            sa: SaParams::default(),
            disturbance: Vec::new(),
        }
    }
}

fn config_err(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}

fn check_sensor(key: &str, p: &SensorParams) -> Result<(), HarnessError> {
    if !(0.0..=1.0).contains(&p.detection_prob) {
        return Err(config_err(format!("{key}.detection_prob = {} outside [0, 1]", p.detection_prob)));
    }
    if !(p.clutter_mean >= 0.0 && p.clutter_mean.is_finite()) {
        return Err(config_err(format!("{key}.clutter_mean = {} must be >= 0", p.clutter_mean)));
    }
    if !(p.noise_std > 0.0 && p.noise_std.is_finite()) {
        return Err(config_err(format!("{key}.noise_std = {} must be > 0", p.noise_std)));
    }
    Ok(())
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.num_steps == 0 {
            return Err(config_err("num_steps must be at least 1"));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(config_err(format!("dt = {} must be > 0", self.dt)));
        }
        if self.num_sensors == 0 || self.num_sensors > 255 {
            return Err(config_err(format!("num_sensors = {} outside 1..=255", self.num_sensors)));
        }
        if self.mc_runs == 0 {
            return Err(config_err("mc_runs must be at least 1"));
        }
        if !(self.process_noise >= 0.0 && self.process_noise.is_finite()) {
            return Err(config_err(format!("process_noise = {} must be >= 0", self.process_noise)));
        }
        if !self.init_velocity.iter().all(|v| v.is_finite()) {
            return Err(config_err("init_velocity must be finite"));
        }
        if !(self.init_velocity_std >= 0.0 && self.init_velocity_std.is_finite()) {
            return Err(config_err(format!("init_velocity_std = {} must be >= 0", self.init_velocity_std)));
        }
        if !(self.divergence_variance > 0.0) {
            return Err(config_err("divergence_variance must be > 0"));
        }
        if !(self.fov.width > 0.0 && self.fov.height > 0.0 && self.fov.volume().is_finite()) {
            return Err(config_err("fov.width and fov.height must be > 0"));
        }
        check_sensor("sensor", &self.sensor)?;
        for (i, o) in self.sensor_override.iter().enumerate() {
            if o.id == 0 || o.id > self.num_sensors {
                return Err(config_err(format!("sensor_override[{i}].id = {} outside 1..={}", o.id, self.num_sensors)));
            }
            let key = format!("sensor_override[{i}]");
            check_sensor(&key, &self.assumed_params(o.id))?;
            check_sensor(&key, &self.true_params(o.id))?;
        }
        self.sa.validate().map_err(|e| config_err(format!("sa: {e}")))?;
        for (i, d) in self.disturbance.iter().enumerate() {
            let key = format!("disturbance[{i}]");
            if d.sensor == 0 || d.sensor > self.num_sensors {
                return Err(config_err(format!("{key}.sensor = {} outside 1..={}", d.sensor, self.num_sensors)));
            }
            if d.start >= d.end || d.end > self.num_steps {
                return Err(config_err(format!(
                    "{key}: interval [{}, {}) must be non-empty and within [0, {})",
                    d.start, d.end, self.num_steps
                )));
            }
            let ok = match d.kind {
                DisturbanceKind::NoiseScale | DisturbanceKind::ClutterScale => d.value > 0.0 && d.value.is_finite(),
                DisturbanceKind::PdSet => (0.0..=1.0).contains(&d.value),
            };
            if !ok {
                return Err(config_err(format!("{key}.value = {} invalid for {:?}", d.value, d.kind)));
            }
        }
        Ok(())
    }

    fn override_for(&self, sensor: usize) -> SensorOverride {
        // later entries win
        self.sensor_override.iter().rev().find(|o| o.id == sensor).copied().unwrap_or_default()
    }

    /// Parameters the tracker and the self-assessment assume for `sensor`.
    pub fn assumed_params(&self, sensor: usize) -> SensorParams {
        let o = self.override_for(sensor);
        SensorParams {
            detection_prob: o.detection_prob.unwrap_or(self.sensor.detection_prob),
            clutter_mean: o.clutter_mean.unwrap_or(self.sensor.clutter_mean),
            noise_std: o.noise_std.unwrap_or(self.sensor.noise_std),
        }
    }

    /// Undisturbed parameters of the simulated `sensor`.
    pub fn true_params(&self, sensor: usize) -> SensorParams {
        let o = self.override_for(sensor);
        let a = self.assumed_params(sensor);
        SensorParams {
            detection_prob: o.true_detection_prob.unwrap_or(a.detection_prob),
            clutter_mean: o.true_clutter_mean.unwrap_or(a.clutter_mean),
            noise_std: o.true_noise_std.unwrap_or(a.noise_std),
        }
    }

    /// True parameters of `sensor` at `step`, disturbances applied in order.
    pub fn true_params_at(&self, sensor: usize, step: u64) -> SensorParams {
        let mut p = self.true_params(sensor);
        for d in self.disturbance.iter().filter(|d| d.active(sensor, step)) {
            match d.kind {
                DisturbanceKind::NoiseScale => p.noise_std *= d.value,
                DisturbanceKind::ClutterScale => p.clutter_mean *= d.value,
                DisturbanceKind::PdSet => p.detection_prob = d.value,
            }
        }
        p
    }

    pub fn assumed_sensor_model(&self, sensor: usize) -> SensorModel {
        let p = self.assumed_params(sensor);
        SensorModel::position_2d(p.detection_prob, p.clutter_mean, self.fov.volume(), p.noise_std)
    }

    pub fn motion_model(&self) -> MotionModel {
        MotionModel::constant_velocity_2d(self.dt, self.process_noise)
    }

    /// Effective configuration as TOML, with the per-sensor models spelled out.
    pub fn resolved_text(&self) -> Result<String, HarnessError> {
        let body = toml::to_string(self).map_err(|e| config_err(e.to_string()))?;
        let mut out = String::from("# effective configuration\n");
        for s in 1..=self.num_sensors {
            let a = self.assumed_params(s);
            let t = self.true_params(s);
            out.push_str(&format!(
                "# sensor {s} assumed: detection_prob={} clutter_mean={} noise_std={}\n",
                a.detection_prob, a.clutter_mean, a.noise_std
            ));
            out.push_str(&format!(
                "# sensor {s} true:    detection_prob={} clutter_mean={} noise_std={}\n",
                t.detection_prob, t.clutter_mean, t.noise_std
            ));
        }
        out.push_str(&format!("# fov volume: {} m^2\n\n", self.fov.volume()));
        out.push_str(&body);
        Ok(out)
    }
}

/// Parses and validates a TOML configuration; omitted keys take defaults.
pub fn parse_config_str(text: &str) -> Result<ScenarioConfig, HarnessError> {
    let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| config_err(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_config(path: &Path) -> Result<ScenarioConfig, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
    parse_config_str(&text).map_err(|e| match e {
        HarnessError::Config(msg) => HarnessError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Bundled configuration by name.
pub fn preset(name: &str) -> Result<ScenarioConfig, HarnessError> {
    match name {
        "paper_scenario" => parse_config_str(PAPER_SCENARIO),
        "nominal" => parse_config_str(NOMINAL),
        other => Err(config_err(format!("unknown preset `{other}` (known: {})", PRESETS.join(", ")))),
    }
}
