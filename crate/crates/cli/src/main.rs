use std::path::PathBuf;
use std::process::ExitCode;

use batflight_cli::{execute, Command, ScenarioConfig};
use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "batflight", version, about = "Bat-robot flight simulation and gait optimization")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Scenario file; without one the reference scenario is used.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (overrides `out_dir` in the scenario).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for optimizer batches.
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Integration step in seconds.
    #[arg(long, global = true)]
    dt: Option<f64>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Cmd {
    /// Open-loop flight with the configured gait.
    SimulateGait,
    /// Search the 11 gait parameters for zero mean angular momentum.
    OptimizeGait,
    /// Search the maneuver start and joint offsets for a half roll.
    OptimizePerch,
    /// Open-loop perching maneuver on top of the gait.
    SimulatePerch,
    /// Torque-driven PID tracking of the maneuver reference.
    TrackPid,
    /// Print the reference scenario file.
    ExampleConfig,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match cli.command {
        Cmd::SimulateGait => Command::SimulateGait,
        Cmd::OptimizeGait => Command::OptimizeGait,
        Cmd::OptimizePerch => Command::OptimizePerch,
        Cmd::SimulatePerch => Command::SimulatePerch,
        Cmd::TrackPid => Command::TrackPid,
        Cmd::ExampleConfig => {
            print!("{}", batflight_cli::config::EXAMPLE);
            return ExitCode::SUCCESS;
        }
    };
    let config = match &cli.config {
        Some(path) => ScenarioConfig::load(path),
        None => Ok(ScenarioConfig::default()),
    };
    let config = match config {
        Ok(c) => c.with_overrides(cli.seed, cli.workers, cli.dt),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let out = cli.out.or_else(|| config.out_dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
    match execute(command, &config, &out) {
        Ok(bundle) => {
            println!("{}: wrote {}", command.name(), out.display());
            println!("{}", serde_json::to_string_pretty(&bundle.result.metrics).unwrap_or_default());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
