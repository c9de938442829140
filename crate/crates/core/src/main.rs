use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sltrack::harness::{parse_config, preset, run_monte_carlo, write_outputs, HarnessError, ScenarioConfig};

/// Monte-Carlo self-assessment of a single-object tracker.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a TOML config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run a bundled scenario (paper_scenario, nominal).
    Preset {
        name: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Number of Monte-Carlo runs; overrides the config.
    #[arg(long)]
    runs: Option<usize>,
    /// Master seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Also write one SVG chart per sensor.
    #[arg(long)]
    svg: bool,
}

fn execute(mut cfg: ScenarioConfig, common: &Common) -> Result<(), HarnessError> {
    if let Some(runs) = common.runs {
        cfg.mc_runs = runs;
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    let out = run_monte_carlo(&cfg)?;
    write_outputs(&cfg, &out, &common.out, common.svg)?;
    let warnings: usize = out.runs.iter().map(|r| r.warnings.len()).sum();
    if warnings > 0 {
        eprintln!("{warnings} run warnings (divergence or field-of-view exits)");
    }
    println!("wrote {}", common.out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { config, common } => parse_config(config).and_then(|cfg| execute(cfg, common)),
        Command::Preset { name, common } => preset(name).and_then(|cfg| execute(cfg, common)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                HarnessError::Config(_) => 2,
                HarnessError::Io(_) => 3,
                _ => 1,
            })
        }
    }
}
