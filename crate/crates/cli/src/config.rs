//! Scenario files.
//!
//! A scenario is one TOML document. Physical quantities are written as
//! `{ value = ..., unit = "..." }` tables so the file can use the units of a
//! datasheet (g, mm, g*cm^2, Hz) or SI; joint angles are bare numbers in
//! degrees with a `_deg` suffix on the key. Every section is optional and
//! falls back to the reference robot and the published gait, but a section
//! that is present must be complete.

use std::path::{Path, PathBuf};

use batflight::aero::WindField;
use batflight::gait::{
    GaitParams, ManeuverParams, DEFAULT_RAMP, PERCHING_OFFSET_DEG, PERCHING_START, ZERO_MOMENTUM_DEG,
};
use batflight::opt::{GaitCostConfig, OptimizerSettings, PerchCostConfig};
use batflight::sim::{PidGains, SimConfig};
use batflight::units::Quantity;
use batflight::ModelParams;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scalar {
    pub value: f64,
    pub unit: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Triple {
    pub value: [f64; 3],
    pub unit: String,
}

impl Scalar {
    pub fn new(value: f64, unit: &str) -> Self {
        Self { value, unit: unit.to_owned() }
    }

    fn si(&self, q: Quantity, path: &str) -> Result<f64, CliError> {
        q.to_si(self.value, &self.unit).map_err(|e| CliError::field(path, e))
    }
}

impl Triple {
    pub fn new(value: [f64; 3], unit: &str) -> Self {
        Self { value, unit: unit.to_owned() }
    }

    fn si(&self, q: Quantity, path: &str) -> Result<[f64; 3], CliError> {
        let f = q.factor(&self.unit).map_err(|e| CliError::field(path, e))?;
        Ok(self.value.map(|v| v * f))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub body_mass: Scalar,
    pub arm_mass: Scalar,
    pub wing_mass: Scalar,
    pub body_inertia: Triple,
    pub arm_inertia: Triple,
    pub wing_inertia: Triple,
    pub l_l1: Triple,
    pub l_l2: Triple,
    pub l_l3: Triple,
    pub l_r1: Triple,
    pub l_r2: Triple,
    pub l_r3: Triple,
    pub chord: Scalar,
    pub span: Scalar,
    pub air_density: Scalar,
    pub flap_frequency: Scalar,
    pub gravity: Scalar,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self {
            body_mass: Scalar::new(5.0, "g"),
            arm_mass: Scalar::new(0.35, "g"),
            wing_mass: Scalar::new(5.6, "g"),
            body_inertia: Triple::new([0.625, 3.65, 3.65], "g*cm^2"),
            arm_inertia: Triple::new([0.147, 0.147, 0.040], "g*cm^2"),
            wing_inertia: Triple::new([1.05, 2.11, 2.11], "g*cm^2"),
            l_l1: Triple::new([0.0, 25.0, 25.0], "mm"),
            l_l2: Triple::new([0.0, 0.0, 50.0], "mm"),
            l_l3: Triple::new([0.0, 0.0, 150.0], "mm"),
            l_r1: Triple::new([0.0, -25.0, 25.0], "mm"),
            l_r2: Triple::new([0.0, 0.0, 50.0], "mm"),
            l_r3: Triple::new([0.0, 0.0, 150.0], "mm"),
            chord: Scalar::new(150.0, "mm"),
            span: Scalar::new(150.0, "mm"),
            air_density: Scalar::new(1.0, "kg/m^3"),
            flap_frequency: Scalar::new(10.0, "Hz"),
            gravity: Scalar::new(9.81, "m/s^2"),
        }
    }
}

impl ModelSection {
    pub fn resolve(&self) -> Result<ModelParams, CliError> {
        use Quantity::*;
        let v = |t: &Triple, q, path| t.si(q, path).map(|a| a.into());
        let params = ModelParams {
            body_mass: self.body_mass.si(Mass, "model.body_mass")?,
            arm_mass: self.arm_mass.si(Mass, "model.arm_mass")?,
            wing_mass: self.wing_mass.si(Mass, "model.wing_mass")?,
            body_inertia: v(&self.body_inertia, Inertia, "model.body_inertia")?,
            arm_inertia: v(&self.arm_inertia, Inertia, "model.arm_inertia")?,
            wing_inertia: v(&self.wing_inertia, Inertia, "model.wing_inertia")?,
            left_links: [
                v(&self.l_l1, Length, "model.l_l1")?,
                v(&self.l_l2, Length, "model.l_l2")?,
                v(&self.l_l3, Length, "model.l_l3")?,
            ],
            right_links: [
                v(&self.l_r1, Length, "model.l_r1")?,
                v(&self.l_r2, Length, "model.l_r2")?,
                v(&self.l_r3, Length, "model.l_r3")?,
            ],
            chord: self.chord.si(Length, "model.chord")?,
            span: self.span.si(Length, "model.span")?,
            air_density: self.air_density.si(Density, "model.air_density")?,
            flap_frequency: self.flap_frequency.si(Frequency, "model.flap_frequency")?,
            gravity: self.gravity.si(Acceleration, "model.gravity")?,
        };
        params.validate().map_err(|e| CliError::field("model", e))?;
        Ok(params)
    }
}

fn one() -> usize {
    1
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSection {
    pub dt: Scalar,
    pub t_end: Scalar,
    pub wind: Triple,
    pub record_stride: usize,
    #[serde(default = "one")]
    pub substeps: usize,
    #[serde(default = "yes")]
    pub aero: bool,
}

impl Default for SimSection {
    fn default() -> Self {
        let d = SimConfig::default();
        Self {
            dt: Scalar::new(d.dt, "s"),
            t_end: Scalar::new(d.t_end, "s"),
            wind: Triple::new(d.wind.velocity.into(), "m/s"),
            record_stride: d.record_stride,
            substeps: d.substeps,
            aero: d.aero,
        }
    }
}

impl SimSection {
    pub fn resolve(&self) -> Result<SimConfig, CliError> {
        let [x, y, z] = self.wind.si(Quantity::Velocity, "sim.wind")?;
        let config = SimConfig {
            dt: self.dt.si(Quantity::Time, "sim.dt")?,
            t_end: self.t_end.si(Quantity::Time, "sim.t_end")?,
            wind: WindField::new(x, y, z),
            record_stride: self.record_stride,
            substeps: self.substeps,
            aero: self.aero,
        };
        config.validate().map_err(|e| CliError::field("sim", e))?;
        Ok(config)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaitSection {
    /// Plunge, mediolateral, elbow, feathering.
    pub mean_deg: [f64; 4],
    pub amplitude_deg: [f64; 4],
    /// Mediolateral, elbow, feathering, relative to plunge.
    pub phase_deg: [f64; 3],
}

impl Default for GaitSection {
    fn default() -> Self {
        let k = ZERO_MOMENTUM_DEG;
        Self {
            mean_deg: [k[0], k[1], k[2], k[3]],
            amplitude_deg: [k[4], k[5], k[6], k[7]],
            phase_deg: [k[8], k[9], k[10]],
        }
    }
}

impl GaitSection {
    pub fn from_params(k1: &GaitParams) -> Self {
        Self {
            mean_deg: k1.mean.map(f64::to_degrees),
            amplitude_deg: k1.amplitude.map(f64::to_degrees),
            phase_deg: k1.phase.map(f64::to_degrees),
        }
    }

    pub fn resolve(&self) -> Result<GaitParams, CliError> {
        let all = self.mean_deg.iter().chain(&self.amplitude_deg).chain(&self.phase_deg);
        if all.clone().any(|v| !v.is_finite()) {
            return Err(CliError::invalid("gait", "angles must be finite"));
        }
        let k: Vec<f64> = all.map(|v| v.to_radians()).collect();
        Ok(GaitParams::from_vec(&k))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ManeuverSection {
    pub start: Scalar,
    /// Plunge, mediolateral, elbow, feathering offsets.
    pub offset_deg: [f64; 4],
    pub ramp: Scalar,
}

impl Default for ManeuverSection {
    fn default() -> Self {
        Self {
            start: Scalar::new(PERCHING_START, "s"),
            offset_deg: PERCHING_OFFSET_DEG,
            ramp: Scalar::new(DEFAULT_RAMP, "s"),
        }
    }
}

impl ManeuverSection {
    pub fn from_params(k2: &ManeuverParams) -> Self {
        Self {
            start: Scalar::new(k2.start, "s"),
            offset_deg: k2.offset.map(f64::to_degrees),
            ramp: Scalar::new(k2.ramp, "s"),
        }
    }

    pub fn resolve(&self) -> Result<ManeuverParams, CliError> {
        let start = self.start.si(Quantity::Time, "maneuver.start")?;
        let ramp = self.ramp.si(Quantity::Time, "maneuver.ramp")?;
        if !start.is_finite() || start < 0.0 {
            return Err(CliError::invalid("maneuver.start", "must be finite and >= 0"));
        }
        if !(ramp > 0.0) || !ramp.is_finite() {
            return Err(CliError::invalid("maneuver.ramp", "must be finite and > 0"));
        }
        if self.offset_deg.iter().any(|v| !v.is_finite()) {
            return Err(CliError::invalid("maneuver.offset_deg", "must be finite"));
        }
        Ok(ManeuverParams { start, offset: self.offset_deg.map(f64::to_radians), ramp })
    }
}

/// Where the gait search starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StartPoint {
    /// The `[gait]` section.
    Config,
    /// A uniform draw inside the bounds from the scenario seed.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaitOptimizerSection {
    pub budget: usize,
    /// Initial simplex edge as a fraction of each bound's width.
    pub initial_step: f64,
    /// Diagonal of `Q` for `[Π_x, Π_y, Π_z, ṗ_z]`.
    pub weights: [f64; 4],
    pub start: StartPoint,
}

impl Default for GaitOptimizerSection {
    fn default() -> Self {
        let s = OptimizerSettings::default();
        Self {
            budget: s.budget,
            initial_step: s.initial_step,
            weights: GaitCostConfig::default().weights,
            start: StartPoint::Config,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PerchOptimizerSection {
    pub budget: usize,
    pub initial_step: f64,
    pub start_bounds: [Scalar; 2],
    pub offset_bound_deg: f64,
}

impl Default for PerchOptimizerSection {
    fn default() -> Self {
        let d = PerchCostConfig::default();
        Self {
            budget: OptimizerSettings::default().budget,
            initial_step: OptimizerSettings::default().initial_step,
            start_bounds: [Scalar::new(d.start_bounds.0, "s"), Scalar::new(d.start_bounds.1, "s")],
            offset_bound_deg: d.offset_bound.to_degrees(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PidSection {
    /// [N·m/rad]
    pub kp: f64,
    /// [N·m/(rad·s)]
    pub ki: f64,
    /// [N·m·s/rad]
    pub kd: f64,
    /// RK4 sub-steps per control step for the torque-driven run.
    pub substeps: usize,
}

impl Default for PidSection {
    fn default() -> Self {
        let g = PidGains::baseline();
        Self { kp: g.kp, ki: g.ki, kd: g.kd, substeps: 10 }
    }
}

impl PidSection {
    pub fn gains(&self) -> Result<PidGains, CliError> {
        if [self.kp, self.ki, self.kd].iter().any(|g| !g.is_finite() || *g < 0.0) {
            return Err(CliError::invalid("pid", "gains must be finite and >= 0"));
        }
        if self.substeps == 0 {
            return Err(CliError::invalid("pid.substeps", "must be at least 1"));
        }
        Ok(PidGains { kp: self.kp, ki: self.ki, kd: self.kd })
    }
}

/// A complete scenario as read from disk.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub seed: u64,
    /// Worker threads for optimizer batches; absent means one per core.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    /// Output directory; the `--out` flag overrides it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub sim: SimSection,
    #[serde(default)]
    pub gait: GaitSection,
    #[serde(default)]
    pub maneuver: ManeuverSection,
    #[serde(default)]
    pub gait_optimizer: GaitOptimizerSection,
    #[serde(default)]
    pub perch_optimizer: PerchOptimizerSection,
    #[serde(default)]
    pub pid: PidSection,
}

/// A scenario converted to SI and checked.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub seed: u64,
    pub workers: Option<usize>,
    pub params: ModelParams,
    pub sim: SimConfig,
    pub gait: GaitParams,
    pub maneuver: ManeuverParams,
    pub gait_cost: GaitCostConfig,
    pub gait_settings: OptimizerSettings,
    pub gait_start: StartPoint,
    pub perch_cost: PerchCostConfig,
    pub perch_settings: OptimizerSettings,
    pub pid: PidGains,
    pub pid_substeps: usize,
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.to_owned(), source: e })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    /// Applies `--seed`, `--workers` and `--dt`.
    pub fn with_overrides(mut self, seed: Option<u64>, workers: Option<usize>, dt: Option<f64>) -> Self {
        if let Some(s) = seed {
            self.seed = s;
        }
        if workers.is_some() {
            self.workers = workers;
        }
        if let Some(dt) = dt {
            self.sim.dt = Scalar::new(dt, "s");
        }
        self
    }

    pub fn resolve(&self) -> Result<Scenario, CliError> {
        let params = self.model.resolve()?;
        let sim = self.sim.resolve()?;
        let gait = self.gait.resolve()?;
        let maneuver = self.maneuver.resolve()?;
        if self.workers == Some(0) {
            return Err(CliError::invalid("workers", "must be at least 1"));
        }

        let go = &self.gait_optimizer;
        let gait_cost = GaitCostConfig { sim, weights: go.weights, ..GaitCostConfig::default() };
        gait_cost.validate().map_err(|e| CliError::field("gait_optimizer.weights", e))?;
        let gait_settings = settings(go.budget, go.initial_step, self.seed, self.workers, "gait_optimizer")?;

        let po = &self.perch_optimizer;
        let perch_cost = PerchCostConfig {
            sim,
            gait,
            ramp: maneuver.ramp,
            start_bounds: (
                po.start_bounds[0].si(Quantity::Time, "perch_optimizer.start_bounds")?,
                po.start_bounds[1].si(Quantity::Time, "perch_optimizer.start_bounds")?,
            ),
            offset_bound: po.offset_bound_deg.to_radians(),
        };
        perch_cost.validate().map_err(|e| CliError::field("perch_optimizer", e))?;
        let perch_settings = settings(po.budget, po.initial_step, self.seed, self.workers, "perch_optimizer")?;

        Ok(Scenario {
            seed: self.seed,
            workers: self.workers,
            params,
            sim,
            gait,
            maneuver,
            gait_cost,
            gait_settings,
            gait_start: go.start,
            perch_cost,
            perch_settings,
            pid: self.pid.gains()?,
            pid_substeps: self.pid.substeps,
        })
    }
}

fn settings(
    budget: usize,
    initial_step: f64,
    seed: u64,
    workers: Option<usize>,
    section: &str,
) -> Result<OptimizerSettings, CliError> {
    if budget == 0 {
        return Err(CliError::invalid(&format!("{section}.budget"), "must be at least 1"));
    }
    if !(initial_step > 0.0 && initial_step <= 1.0) {
        return Err(CliError::invalid(&format!("{section}.initial_step"), "must lie in (0, 1]"));
    }
    Ok(OptimizerSettings { budget, seed, initial_step, workers, ..OptimizerSettings::default() })
}

/// The canonical scenario shipped with the tool.
pub const EXAMPLE: &str = include_str!("../scenarios/reference.toml");
