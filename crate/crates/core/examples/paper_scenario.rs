//! Runs the bundled disturbance scenario and summarizes, per sensor and
//! aspect, how often the averaged DC exceeds its threshold in each window.
//!
//! `cargo run --release --example paper_scenario [preset] [runs] [out_dir]`

use std::path::PathBuf;
use std::time::Instant;

use sltrack::assessment::Aspect;
use sltrack::harness::{preset, run_monte_carlo, write_outputs, Metric, ScoreTable};

fn flagged(t: &ScoreTable, sensor: usize, aspect: Aspect, step: u64) -> bool {
    let dc = t.get(step, sensor, Metric::dc(aspect)).unwrap();
    let thr = t.get(step, sensor, Metric::thr(aspect)).unwrap();
    dc > thr
}

fn nis_outside(t: &ScoreTable, sensor: usize, step: u64) -> Option<bool> {
    let avg = t.get(step, sensor, Metric::NisAvg)?;
    Some(avg < t.get(step, sensor, Metric::NisLo)? || avg > t.get(step, sensor, Metric::NisHi)?)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "paper_scenario".into());
    let mut cfg = preset(&name)?;
    if let Some(runs) = args.next() {
        cfg.mc_runs = runs.parse()?;
    }
    let out_dir = args.next().map(PathBuf::from);

    let start = Instant::now();
    let out = run_monte_carlo(&cfg)?;
    println!("{} runs in {:.1} s", cfg.mc_runs, start.elapsed().as_secs_f64());
    let t = &out.averaged;

    let windows = [
        ("noise", 100, 200),
        ("calm", 200, 300),
        ("clutter", 300, 350),
        ("calm", 350, 450),
        ("pd", 450, 500),
        ("calm", 500, cfg.num_steps),
    ];
    for sensor in 1..=cfg.num_sensors {
        println!("sensor {sensor}");
        for (name, a, b) in windows {
            let mut line = format!("  {name:>7} [{a:>3},{b:>3})");
            for aspect in Aspect::ALL {
                let hits = (a..b).filter(|&k| flagged(t, sensor, aspect, k)).count();
                let first = (a..b).find(|&k| flagged(t, sensor, aspect, k)).map(|k| (k - a).to_string());
                line += &format!(
                    "  {}={:.2} (+{})",
                    aspect.short_name(),
                    hits as f64 / (b - a) as f64,
                    first.unwrap_or_else(|| "-".into())
                );
            }
            let outside: Vec<bool> = (a..b).filter_map(|k| nis_outside(t, sensor, k)).collect();
            let frac = outside.iter().filter(|o| **o).count() as f64 / outside.len().max(1) as f64;
            line += &format!("  nis_out={frac:.2}");
            println!("{line}");
        }
    }
    let warnings: Vec<_> = out.runs.iter().flat_map(|r| r.warnings.iter()).collect();
    println!("warnings across runs: {}", warnings.len());
    for w in warnings.iter().take(10) {
        println!("  {w:?}");
    }

    if let Some(dir) = out_dir {
        write_outputs(&cfg, &out, &dir, true)?;
        println!("wrote {}", dir.display());
    }
    Ok(())
}
