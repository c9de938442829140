//! A small Monte-Carlo study from an inline config: averaged scores written
//! as CSV and SVG, and the CSV reproduced byte for byte.
//!
//! `cargo run --release --example monte_carlo_export [out_dir]`

use std::path::PathBuf;

use sltrack::harness::{csv_string, parse_config_str, run_monte_carlo, write_outputs, Metric};

const CONFIG: &str = r#"
num_steps = 300
mc_runs = 40
seed = 7

[sensor]
detection_prob = 0.9
clutter_mean = 4.0

[[sensor_override]]
id = 3
true_noise_std = 1.5

[[disturbance]]
sensor = 2
start = 150
end = 220
kind = "pd_set"
value = 0.5
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = parse_config_str(CONFIG)?;
    let out = run_monte_carlo(&cfg)?;
    let t = &out.averaged;
    for s in 1..=cfg.num_sensors {
        let flagged = (100..cfg.num_steps)
            .filter(|&k| t.get(k, s, Metric::DcAssoc).unwrap() > t.get(k, s, Metric::ThrAssoc).unwrap())
            .count();
        let meas = (100..cfg.num_steps)
            .filter(|&k| t.get(k, s, Metric::DcMeas).unwrap() > t.get(k, s, Metric::ThrMeas).unwrap())
            .count();
        println!("sensor {s}: association flagged at {flagged} steps, measurement at {meas} steps");
    }

    let again = run_monte_carlo(&cfg)?;
    assert_eq!(csv_string(&out.averaged), csv_string(&again.averaged));
    println!("second execution reproduced the CSV exactly");

    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("sltrack_mc"));
    write_outputs(&cfg, &out, &dir, true)?;
    println!("wrote {}", dir.display());
    Ok(())
}
