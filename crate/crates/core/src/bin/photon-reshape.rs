use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use photon_reshape::expcli::{self, RunOptions, Scenario, ScenarioKind};
use photon_reshape::Result;

/// Simulate XPM reshaping of photon-pair spectra from a JSON scenario file.
#[derive(Parser)]
#[command(name = "photon-reshape", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario and write its outputs.
    Run {
        config: PathBuf,
        /// Worker threads for sweep points.
        #[arg(long)]
        jobs: Option<usize>,
        /// Output directory (overrides `output_dir`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also render SVG plots.
        #[arg(long)]
        svg: bool,
    },
    /// Parse and check a config without running it.
    Validate { config: PathBuf },
    /// Calibrate the control peak power for the config's target shift.
    Calibrate {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("PHOTON_RESHAPE_LOG", "warn")).init();
    match dispatch(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Run { config, jobs, out, svg } => {
            let sc = Scenario::load(&config)?;
            let (dir, result) = expcli::run(&sc, &RunOptions { jobs, out_dir: out, svg })?;
            println!("{}", serde_json::to_string_pretty(&result.summary)?);
            eprintln!("wrote {} files to {}", result.artifacts.len(), dir.display());
        }
        Command::Validate { config } => {
            let sc = Scenario::load(&config)?;
            println!(
                "ok: {} ({} ΔT points, {} delays, jsa grid {}, control grid {})",
                sc.kind.name(),
                sc.delta_ts.len(),
                sc.hom_delays.len(),
                sc.jsa_grid.n(),
                sc.control_grid.n()
            );
        }
        Command::Calibrate { config, out } => {
            let mut sc = Scenario::load(&config)?;
            sc.kind = ScenarioKind::Calibrate;
            let (_, result) = expcli::run(&sc, &RunOptions { jobs: None, out_dir: out, svg: false })?;
            println!("{}", serde_json::to_string_pretty(&result.summary)?);
        }
    }
    Ok(())
}
