//! Kalman filter with nearest-neighbour association on one simulated sensor
//! in Poisson clutter.

use nalgebra::{DMatrix, DVector};
use sltrack::harness::{generate_scenario, parse_config_str};
use sltrack::tracker::{
    associate_nn, predict, transformed_likelihood_value, update, MotionModel, SensorModel, TrackState,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = parse_config_str("num_steps = 300\nnum_sensors = 1\n[sensor]\nclutter_mean = 8.0\n")?;
    let scenario = generate_scenario(&cfg, 42)?;
    let motion = MotionModel::constant_velocity_2d(cfg.dt, cfg.process_noise);
    let sensor = SensorModel::position_2d(0.9, 8.0, cfg.fov.volume(), cfg.sensor.noise_std);

    let first = &scenario.scans[0][0];
    let z0 = &first.scan.points[first.object_index.ok_or("object missed at step 0")?];
    let r = cfg.sensor.noise_std.powi(2);
    let v = cfg.init_velocity_std.powi(2);
    let mut state = TrackState::new(
        DVector::from_vec(vec![z0[0], z0[1], cfg.init_velocity[0], cfg.init_velocity[1]]),
        DMatrix::from_diagonal(&DVector::from_vec(vec![r, r, v, v])),
        0,
    )?;

    let (mut hits, mut clutter_hits, mut nis_sum, mut sq_err) = (0, 0, 0.0, 0.0);
    for k in 1..cfg.num_steps as usize {
        let scan = &scenario.scans[k][0];
        let pred = predict(&state, &motion)?;
        let innov = associate_nn(&pred, &scan.scan, &sensor, cfg.sa.gate_prob)?;
        if let Some(z) = transformed_likelihood_value(&innov) {
            hits += 1;
            nis_sum += z;
            // assoc_index is 1-based, object_index 0-based
            if scan.object_index != Some(innov.assoc_index - 1) {
                clutter_hits += 1;
            }
        }
        state = update(&pred, &innov, &sensor)?;
        let truth = &scenario.truth[k];
        sq_err += (state.mean[0] - truth[0]).powi(2) + (state.mean[1] - truth[1]).powi(2);
        if k % 50 == 0 {
            println!(
                "k={k:>3}  estimate=({:8.2}, {:6.2})  truth=({:8.2}, {:6.2})  scan size={}",
                state.mean[0],
                state.mean[1],
                truth[0],
                truth[1],
                scan.scan.len()
            );
        }
    }
    let steps = (cfg.num_steps - 1) as f64;
    println!("associated {hits}/{steps} steps, {clutter_hits} of them to clutter");
    println!("mean NIS {:.3} (2 for a consistent filter)", nis_sum / hits as f64);
    println!("position RMSE {:.3} m", (sq_err / steps).sqrt());
    Ok(())
}
