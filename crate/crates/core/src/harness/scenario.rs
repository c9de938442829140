use nalgebra::{DVector, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use super::{FovMode, HarnessError, ScenarioConfig};
use crate::tracker::MeasurementScan;

/// Seed of run `run` under `master`; a fixed function of the pair, so serial
/// and parallel execution see the same streams.
pub fn run_seed(master: u64, run: u64) -> u64 {
    // splitmix64 finalizer over the pair
    let mut z = master ^ run.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent stream `channel` of a run: 0 drives the truth, `s` drives
/// sensor `s`.
pub(crate) fn stream(run_seed: u64, channel: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(run_seed);
    rng.set_stream(channel);
    rng
}

/// One simulated scan together with what generated it.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorScan {
    pub scan: MeasurementScan,
    /// 0-based index of the object detection in `scan.points`.
    pub object_index: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// True `[x, y, vx, vy]` per step.
    pub truth: Vec<DVector<f64>>,
    /// Centre of the field of view per step.
    pub fov_centers: Vec<Vector2<f64>>,
    /// `scans[k][s]` is the scan of sensor `s + 1` at step `k`.
    pub scans: Vec<Vec<SensorScan>>,
    /// Steps at which the object was outside the field of view.
    pub outside_fov: Vec<u64>,
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Ground truth and per-sensor scans for one run.
pub fn generate_scenario(cfg: &ScenarioConfig, run_seed: u64) -> Result<Scenario, HarnessError> {
    cfg.validate()?;
    let motion = cfg.motion_model();
    let q_chol = if cfg.process_noise > 0.0 {
        Some(
            motion
                .process_noise
                .clone()
                .cholesky()
                .ok_or_else(|| HarnessError::Config("process noise is not positive definite".into()))?
                .l(),
        )
    } else {
        None
    };

    let mut truth_rng = stream(run_seed, 0);
    let mut sensor_rngs: Vec<ChaCha8Rng> = (1..=cfg.num_sensors).map(|s| stream(run_seed, s as u64)).collect();

    let steps = cfg.num_steps as usize;
    let mut truth = Vec::with_capacity(steps);
    let mut x = DVector::from_vec(vec![
        0.0,
        0.0,
        cfg.init_velocity[0] + cfg.init_velocity_std * gaussian(&mut truth_rng),
        cfg.init_velocity[1] + cfg.init_velocity_std * gaussian(&mut truth_rng),
    ]);
    for k in 0..steps {
        if k > 0 {
            x = &motion.transition * &x;
            if let Some(l) = &q_chol {
                let w = DVector::from_fn(4, |_, _| gaussian(&mut truth_rng));
                x += l * w;
            }
        }
        truth.push(x.clone());
    }

    let (half_w, half_h) = (0.5 * cfg.fov.width, 0.5 * cfg.fov.height);
    let mut fov_centers = Vec::with_capacity(steps);
    let mut outside_fov = Vec::new();
    let mut scans = Vec::with_capacity(steps);
    for (k, xk) in truth.iter().enumerate() {
        let pos = Vector2::new(xk[0], xk[1]);
        let centre = match cfg.fov.mode {
            FovMode::FollowObject => pos,
            FovMode::Fixed => Vector2::zeros(),
        };
        let inside = (pos.x - centre.x).abs() <= half_w && (pos.y - centre.y).abs() <= half_h;
        if !inside {
            outside_fov.push(k as u64);
        }
        fov_centers.push(centre);

        let mut step_scans = Vec::with_capacity(cfg.num_sensors);
        for (s, rng) in sensor_rngs.iter_mut().enumerate() {
            let p = cfg.true_params_at(s + 1, k as u64);
            let detected = inside && rng.random_bool(p.detection_prob);
            let detection = detected.then(|| {
                DVector::from_vec(vec![pos.x + p.noise_std * gaussian(rng), pos.y + p.noise_std * gaussian(rng)])
            });
            let clutter_count = if p.clutter_mean > 0.0 {
                let poisson = Poisson::new(p.clutter_mean).map_err(|e| HarnessError::Config(e.to_string()))?;
                poisson.sample(rng) as usize
            } else {
                0
            };
            let mut points: Vec<DVector<f64>> = (0..clutter_count)
                .map(|_| {
                    DVector::from_vec(vec![
                        centre.x + rng.random_range(-half_w..half_w),
                        centre.y + rng.random_range(-half_h..half_h),
                    ])
                })
                .collect();
            let object_index = detection.map(|z| {
                let at = rng.random_range(0..=points.len());
                points.insert(at, z);
                at
            });
            step_scans.push(SensorScan {
                scan: MeasurementScan { points, sensor_id: s + 1, time_step: k as u64 },
                object_index,
            });
        }
        scans.push(step_scans);
    }

    Ok(Scenario { truth, fov_centers, scans, outside_fov })
}
