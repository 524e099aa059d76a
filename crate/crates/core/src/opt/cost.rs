use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gait::{roll_reference, GaitParams, ManeuverParams, DEFAULT_RAMP};
use crate::model::ModelParams;
use crate::sim::{simulate_gait, simulate_maneuver, Reference, SimConfig, Trace};

use super::Bounds;

/// Cost assigned to a rollout that blew up.
pub const BLOWUP_PENALTY: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaitCostConfig {
    pub sim: SimConfig,
    /// Diagonal of `Q` for `z = [Π, ṗ_B,z]`.
    pub weights: [f64; 4],
    pub bounds: Bounds,
}

impl Default for GaitCostConfig {
    fn default() -> Self {
        Self { sim: SimConfig::default(), weights: [5.0, 5.0, 5.0, 1e-5], bounds: gait_bounds() }
    }
}

impl GaitCostConfig {
    pub fn validate(&self) -> Result<()> {
        if self.weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidConfig("cost weights must be finite and nonnegative".into()));
        }
        self.sim.validate()?;
        self.bounds.validate()
    }
}

/// Box for `k₁`: means within ±180°, amplitudes in [0°, 90°], phases within ±180°.
pub fn gait_bounds() -> Bounds {
    let pi = std::f64::consts::PI;
    let half = std::f64::consts::FRAC_PI_2;
    let mut lo = vec![-pi; 4];
    let mut hi = vec![pi; 4];
    lo.extend([0.0; 4]);
    hi.extend([half; 4]);
    lo.extend([-pi; 3]);
    hi.extend([pi; 3]);
    Bounds::new(lo, hi).expect("static bounds are ordered")
}

/// `Σ zᵀ Q z` over every recorded row, `z = [Π, ṗ_B,z]`.
pub fn gait_cost_of_trace(trace: &Trace, weights: &[f64; 4]) -> f64 {
    trace
        .rows
        .iter()
        .map(|r| {
            let z = [r.momentum.x, r.momentum.y, r.momentum.z, r.velocity().z];
            z.iter().zip(weights).map(|(v, w)| w * v * v).sum::<f64>()
        })
        .sum()
}

/// Simulates the open-loop gait `k₁` and scores it.
pub fn gait_cost(k1: &[f64], params: &ModelParams, config: &GaitCostConfig) -> Result<f64> {
    config.bounds.check(k1)?;
    let reference = Reference::gait(GaitParams::from_vec(k1), params);
    let trace = simulate_gait(&config.sim, params, reference);
    Ok(score(&trace, gait_cost_of_trace(&trace, &config.weights)))
}

fn score(trace: &Trace, cost: f64) -> f64 {
    if trace.completed() && cost.is_finite() {
        cost
    } else {
        BLOWUP_PENALTY
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerchCostConfig {
    pub sim: SimConfig,
    /// Gait the maneuver is superimposed on.
    pub gait: GaitParams,
    /// Ramp period `T` [s].
    pub ramp: f64,
    /// `(min, max)` of `t₀` [s].
    pub start_bounds: (f64, f64),
    /// Symmetric bound on each offset component [rad].
    pub offset_bound: f64,
}

impl Default for PerchCostConfig {
    fn default() -> Self {
        Self {
            sim: SimConfig::default(),
            gait: GaitParams::zero_momentum(),
            ramp: DEFAULT_RAMP,
            start_bounds: (1.0, 1.1),
            offset_bound: 90f64.to_radians(),
        }
    }
}

impl PerchCostConfig {
    pub fn bounds(&self) -> Result<Bounds> {
        let b = self.offset_bound;
        Bounds::new(vec![self.start_bounds.0, -b, -b, -b, -b], vec![self.start_bounds.1, b, b, b, b])
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ramp > 0.0) {
            return Err(Error::InvalidConfig(format!("ramp period must be positive, got {}", self.ramp)));
        }
        self.sim.validate()?;
        self.bounds()?.validate()
    }
}

/// `Σ (ω_B,x − φ̇_r)²` over recorded rows with `t₀ ≤ t ≤ t₀ + 2T`.
pub fn perch_cost_of_trace(trace: &Trace, start: f64, ramp: f64) -> f64 {
    trace
        .window(start, start + 2.0 * ramp)
        .map(|r| {
            let (_, target) = roll_reference(r.t, start, ramp);
            (r.omega().x - target).powi(2)
        })
        .sum()
}

/// Simulates the maneuver `k₂ = [t₀, d]` on top of the configured gait and
/// scores its roll-rate tracking. The rollout stops at the end of the window.
pub fn perch_cost(k2: &[f64], params: &ModelParams, config: &PerchCostConfig) -> Result<f64> {
    config.bounds()?.check(k2)?;
    let maneuver = ManeuverParams::from_vec(k2, config.ramp);
    let reference = Reference::maneuver(config.gait, maneuver, params);
    let sim = SimConfig { t_end: maneuver.end() + config.sim.dt * config.sim.record_stride as f64, ..config.sim };
    let trace = simulate_maneuver(&sim, params, reference);
    Ok(score(&trace, perch_cost_of_trace(&trace, maneuver.start, maneuver.ramp)))
}
