//! The experiments behind each subcommand and the files they leave behind.
//!
//! Every command produces a [`Bundle`]: the trace of its final simulation,
//! `result.json` with metrics and run metadata, a gnuplot script and the
//! effective scenario. The bundle is written even when the run blew up, so
//! the partial trace can be inspected.

use std::path::Path;
use std::time::Instant;

use batflight::gait::{GaitParams, ManeuverParams};
use batflight::opt::{gait_cost, optimize, perch_cost, OptimResult, OptimizerSettings};
use batflight::sim::{simulate_gait, simulate_maneuver, simulate_pid, Reference, SimConfig, Trace};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{GaitSection, ManeuverSection, Scenario, ScenarioConfig, StartPoint};
use crate::error::CliError;
use crate::export::write_trace;
use crate::metrics::{gait_metrics, perch_metrics, pid_metrics, RunSummary};
use crate::plot;

pub const FORMAT_VERSION: u32 = 1;
pub const TRACE_FILE: &str = "trace.csv";
pub const RESULT_FILE: &str = "result.json";
pub const PLOT_FILE: &str = "plot.gp";
pub const CONFIG_FILE: &str = "config.toml";
pub const OPTIMIZED_FILE: &str = "optimized.toml";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    SimulateGait,
    OptimizeGait,
    OptimizePerch,
    SimulatePerch,
    TrackPid,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::SimulateGait => "simulate-gait",
            Command::OptimizeGait => "optimize-gait",
            Command::OptimizePerch => "optimize-perch",
            Command::SimulatePerch => "simulate-perch",
            Command::TrackPid => "track-pid",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Timings {
    pub total_s: f64,
    pub optimization_s: Option<f64>,
    pub simulation_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizationReport {
    /// Best parameters in SI units and radians, in optimizer order.
    pub best: Vec<f64>,
    pub best_cost: f64,
    pub initial: Vec<f64>,
    pub initial_cost: f64,
    pub evaluations: usize,
    pub restarts: usize,
    pub settings: OptimizerSettings,
    /// Best cost after each evaluation.
    pub history: Vec<f64>,
}

impl OptimizationReport {
    fn new(initial: Vec<f64>, result: OptimResult, settings: &OptimizerSettings) -> Self {
        Self {
            best: result.best,
            best_cost: result.best_cost,
            initial,
            initial_cost: result.initial_cost,
            evaluations: result.evaluations,
            restarts: result.restarts,
            settings: settings.clone(),
            history: result.history,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ResultFile {
    pub format_version: u32,
    pub tool_version: &'static str,
    pub command: &'static str,
    pub seed: u64,
    pub workers: Option<usize>,
    pub config_file: &'static str,
    pub trace_file: &'static str,
    pub run: RunSummary,
    pub metrics: serde_json::Value,
    pub optimization: Option<OptimizationReport>,
    pub timings: Timings,
}

/// Everything a command writes.
#[derive(Debug, Clone)]
pub struct Bundle {
    pub trace: Trace,
    pub result: ResultFile,
    pub plot: String,
    pub config: ScenarioConfig,
    /// The optimized parameters as a scenario fragment, for optimizer runs.
    pub optimized: Option<String>,
}

impl Bundle {
    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let io = |path: &Path| {
            let path = path.to_owned();
            move |source| CliError::Io { path, source }
        };
        std::fs::create_dir_all(dir).map_err(io(dir))?;
        let trace_path = dir.join(TRACE_FILE);
        let file = std::fs::File::create(&trace_path).map_err(io(&trace_path))?;
        write_trace(&self.trace, std::io::BufWriter::new(file))
            .map_err(|e| CliError::Io { path: trace_path.clone(), source: e.into() })?;
        let mut json = serde_json::to_string_pretty(&self.result).expect("result serializes");
        json.push('\n');
        let files = [
            (RESULT_FILE, Some(json)),
            (PLOT_FILE, Some(self.plot.clone())),
            (CONFIG_FILE, Some(self.config.to_toml())),
            (OPTIMIZED_FILE, self.optimized.clone()),
        ];
        for (name, text) in files {
            if let Some(text) = text {
                let path = dir.join(name);
                std::fs::write(&path, text).map_err(io(&path))?;
            }
        }
        Ok(())
    }

    /// `Err(BlowUp)` if the recorded simulation stopped early.
    pub fn status(&self) -> Result<(), CliError> {
        match &self.trace.failure {
            None => Ok(()),
            Some(e) => Err(CliError::BlowUp { t: self.trace.last().t, reason: e.to_string() }),
        }
    }
}

fn cost_or_penalty(c: batflight::Result<f64>) -> f64 {
    c.unwrap_or(f64::INFINITY)
}

fn optimizer_error(e: batflight::Error) -> CliError {
    match e {
        batflight::Error::InvalidConfig(m) => CliError::Invalid { path: "optimizer".into(), reason: m },
        other => CliError::Optimizer(other.to_string()),
    }
}

struct Outcome {
    trace: Trace,
    metrics: serde_json::Value,
    plot: String,
    optimization: Option<OptimizationReport>,
    optimized: Option<String>,
    optimization_s: Option<f64>,
    simulation_s: f64,
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}

fn to_json<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("metrics serialize")
}

fn fragment<T: Serialize>(section: &str, value: &T) -> String {
    let table = std::collections::BTreeMap::from([(section, value)]);
    toml::to_string(&table).expect("fragment serializes")
}

fn gait_run(s: &Scenario, k1: GaitParams) -> (Trace, serde_json::Value, f64) {
    let (trace, secs) = timed(|| simulate_gait(&s.sim, &s.params, Reference::gait(k1, &s.params)));
    let metrics = to_json(&gait_metrics(&trace, &s.params));
    (trace, metrics, secs)
}

fn perch_run(s: &Scenario, k2: ManeuverParams) -> (Trace, serde_json::Value, f64) {
    let reference = Reference::maneuver(s.gait, k2, &s.params);
    let (trace, secs) = timed(|| simulate_maneuver(&s.sim, &s.params, reference));
    let metrics = to_json(&perch_metrics(&trace, &k2, &s.params));
    (trace, metrics, secs)
}

fn simulate_gait_cmd(s: &Scenario) -> Outcome {
    let (trace, metrics, simulation_s) = gait_run(s, s.gait);
    Outcome {
        trace,
        metrics,
        plot: plot::gait_script(),
        optimization: None,
        optimized: None,
        optimization_s: None,
        simulation_s,
    }
}

fn optimize_gait_cmd(s: &Scenario) -> Result<Outcome, CliError> {
    let bounds = &s.gait_cost.bounds;
    let x0 = match s.gait_start {
        StartPoint::Config => s.gait.to_vec(),
        StartPoint::Random => bounds.sample(&mut ChaCha8Rng::seed_from_u64(s.seed)),
    };
    let cost = |k: &[f64]| cost_or_penalty(gait_cost(k, &s.params, &s.gait_cost));
    let (result, optimization_s) = timed(|| optimize(cost, bounds, &x0, &s.gait_settings));
    let result = result.map_err(optimizer_error)?;
    let best = GaitParams::from_vec(&result.best);
    let (trace, metrics, simulation_s) = gait_run(s, best);
    Ok(Outcome {
        trace,
        metrics,
        plot: plot::gait_script(),
        optimized: Some(fragment("gait", &GaitSection::from_params(&best))),
        optimization: Some(OptimizationReport::new(x0, result, &s.gait_settings)),
        optimization_s: Some(optimization_s),
        simulation_s,
    })
}

fn simulate_perch_cmd(s: &Scenario) -> Outcome {
    let (trace, metrics, simulation_s) = perch_run(s, s.maneuver);
    Outcome {
        trace,
        metrics,
        plot: plot::perch_script(&s.maneuver),
        optimization: None,
        optimized: None,
        optimization_s: None,
        simulation_s,
    }
}

fn optimize_perch_cmd(s: &Scenario) -> Result<Outcome, CliError> {
    let bounds = s.perch_cost.bounds().map_err(|e| CliError::field("perch_optimizer", e))?;
    let x0 = s.maneuver.to_vec();
    let cost = |k: &[f64]| cost_or_penalty(perch_cost(k, &s.params, &s.perch_cost));
    let (result, optimization_s) = timed(|| optimize(cost, &bounds, &x0, &s.perch_settings));
    let result = result.map_err(optimizer_error)?;
    let best = ManeuverParams::from_vec(&result.best, s.perch_cost.ramp);
    let (trace, metrics, simulation_s) = perch_run(s, best);
    Ok(Outcome {
        trace,
        metrics,
        plot: plot::perch_script(&best),
        optimized: Some(fragment("maneuver", &ManeuverSection::from_params(&best))),
        optimization: Some(OptimizationReport::new(x0, result, &s.perch_settings)),
        optimization_s: Some(optimization_s),
        simulation_s,
    })
}

fn track_pid_cmd(s: &Scenario) -> Outcome {
    let reference = Reference::maneuver(s.gait, s.maneuver, &s.params);
    let torque_sim = SimConfig { substeps: s.pid_substeps, ..s.sim };
    let ((pid, constrained), simulation_s) = timed(|| {
        (simulate_pid(&torque_sim, &s.params, reference, s.pid), simulate_maneuver(&s.sim, &s.params, reference))
    });
    let metrics = to_json(&pid_metrics(&pid, &constrained, &reference));
    Outcome {
        trace: pid,
        metrics,
        plot: plot::pid_script(),
        optimization: None,
        optimized: None,
        optimization_s: None,
        simulation_s,
    }
}

/// Runs `command` on `config` without touching the filesystem.
pub fn run(command: Command, config: &ScenarioConfig) -> Result<Bundle, CliError> {
    let start = Instant::now();
    let s = config.resolve()?;
    let outcome = match command {
        Command::SimulateGait => simulate_gait_cmd(&s),
        Command::OptimizeGait => optimize_gait_cmd(&s)?,
        Command::SimulatePerch => simulate_perch_cmd(&s),
        Command::OptimizePerch => optimize_perch_cmd(&s)?,
        Command::TrackPid => track_pid_cmd(&s),
    };
    let result = ResultFile {
        format_version: FORMAT_VERSION,
        tool_version: env!("CARGO_PKG_VERSION"),
        command: command.name(),
        seed: s.seed,
        workers: s.workers,
        config_file: CONFIG_FILE,
        trace_file: TRACE_FILE,
        run: RunSummary::of(&outcome.trace),
        metrics: outcome.metrics,
        optimization: outcome.optimization,
        timings: Timings {
            total_s: start.elapsed().as_secs_f64(),
            optimization_s: outcome.optimization_s,
            simulation_s: outcome.simulation_s,
        },
    };
    Ok(Bundle {
        trace: outcome.trace,
        result,
        plot: outcome.plot,
        config: config.clone(),
        optimized: outcome.optimized,
    })
}

/// Runs `command`, writes its bundle to `dir` and reports a blow-up as an error.
pub fn execute(command: Command, config: &ScenarioConfig, dir: &Path) -> Result<Bundle, CliError> {
    let bundle = run(command, config)?;
    bundle.write(dir)?;
    bundle.status()?;
    Ok(bundle)
}
