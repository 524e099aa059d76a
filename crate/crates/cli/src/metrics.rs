//! Scalar summaries of a trace.

use batflight::gait::{roll_reference, ManeuverParams};
use batflight::opt::perch_cost_of_trace;
use batflight::sim::{tracking_rms, Reference, Trace, TraceRow};
use batflight::ModelParams;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub completed: bool,
    pub failure: Option<String>,
    pub t_final: f64,
    pub rows: usize,
    pub max_constraint_residual: f64,
}

impl RunSummary {
    pub fn of(trace: &Trace) -> Self {
        Self {
            completed: trace.completed(),
            failure: trace.failure.as_ref().map(|e| e.to_string()),
            t_final: trace.last().t,
            rows: trace.rows.len(),
            max_constraint_residual: trace.max_constraint_residual,
        }
    }
}

/// Steady-flight quality over the last second of a gait run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaitMetrics {
    pub window: [f64; 2],
    /// `‖mean Π‖` [kg·m²/s].
    pub mean_momentum_norm: f64,
    /// `mean ‖Π‖` [kg·m²/s].
    pub mean_of_momentum_norm: f64,
    /// Average over wingbeats of `max ‖Π‖ − min ‖Π‖`.
    pub wingbeat_peak_to_peak: f64,
    /// `mean_momentum_norm / wingbeat_peak_to_peak`.
    pub momentum_ratio: f64,
    /// `‖mean of per-wingbeat mean velocity‖` [m/s].
    pub mean_speed: f64,
    /// RMS spread of the per-wingbeat mean velocities around their mean.
    pub velocity_spread: f64,
    /// `velocity_spread / mean_speed`.
    pub velocity_ratio: f64,
    pub mean_pitch_deg: f64,
    /// Largest `|ω_x|`, `|ω_z|`, `|ṗ_y|` over the whole run.
    pub max_roll_rate: f64,
    pub max_yaw_rate: f64,
    pub max_lateral_speed: f64,
}

fn mean3<'a>(v: impl Iterator<Item = [f64; 3]> + 'a) -> [f64; 3] {
    let mut acc = [0.0; 3];
    let mut n = 0usize;
    for x in v {
        for i in 0..3 {
            acc[i] += x[i];
        }
        n += 1;
    }
    acc.map(|a| a / n.max(1) as f64)
}

fn norm3(v: [f64; 3]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn beats<'a>(trace: &'a Trace, lo: f64, hi: f64, beat: f64) -> Vec<Vec<&'a TraceRow>> {
    let count = ((hi - lo) / beat).round() as usize;
    (0..count)
        .map(|k| {
            let (a, b) = (lo + k as f64 * beat, lo + (k + 1) as f64 * beat);
            trace.rows.iter().filter(|r| r.t >= a - 1e-12 && r.t < b - 1e-12).collect()
        })
        .filter(|rows: &Vec<&TraceRow>| !rows.is_empty())
        .collect()
}

pub fn gait_metrics(trace: &Trace, params: &ModelParams) -> GaitMetrics {
    let end = trace.last().t;
    let lo = (end - 1.0).max(0.0);
    let window: Vec<&TraceRow> = trace.window(lo, end).collect();
    let mean_pi = mean3(window.iter().map(|r| r.momentum.into()));
    let mean_of_norm = window.iter().map(|r| r.momentum.norm()).sum::<f64>() / window.len().max(1) as f64;

    let beat = params.wingbeat();
    let groups = beats(trace, lo, end, beat);
    let p2p = groups
        .iter()
        .map(|g| {
            let n = g.iter().map(|r| r.momentum.norm());
            n.clone().fold(f64::MIN, f64::max) - n.fold(f64::MAX, f64::min)
        })
        .sum::<f64>()
        / groups.len().max(1) as f64;

    let beat_velocity: Vec<[f64; 3]> = groups.iter().map(|g| mean3(g.iter().map(|r| r.velocity().into()))).collect();
    let v_mean = mean3(beat_velocity.iter().copied());
    let spread = (beat_velocity.iter().map(|v| (0..3).map(|i| (v[i] - v_mean[i]).powi(2)).sum::<f64>()).sum::<f64>()
        / beat_velocity.len().max(1) as f64)
        .sqrt();
    let mean_pitch = window.iter().map(|r| r.euler[1]).sum::<f64>() / window.len().max(1) as f64;

    let max_abs = |f: &dyn Fn(&TraceRow) -> f64| trace.rows.iter().map(|r| f(r).abs()).fold(0.0, f64::max);
    GaitMetrics {
        window: [lo, end],
        mean_momentum_norm: norm3(mean_pi),
        mean_of_momentum_norm: mean_of_norm,
        wingbeat_peak_to_peak: p2p,
        momentum_ratio: norm3(mean_pi) / p2p,
        mean_speed: norm3(v_mean),
        velocity_spread: spread,
        velocity_ratio: spread / norm3(v_mean),
        mean_pitch_deg: mean_pitch.to_degrees(),
        max_roll_rate: max_abs(&|r| r.omega().x),
        max_yaw_rate: max_abs(&|r| r.omega().z),
        max_lateral_speed: max_abs(&|r| r.velocity().y),
    }
}

/// Roll response to the perching maneuver. Roll is `∫ ω_B,x dt` measured
/// from the maneuver start.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerchMetrics {
    pub start: f64,
    /// Fraction of the wingbeat at which the maneuver starts, in percent.
    pub start_phase_percent: f64,
    /// Signed roll of largest magnitude within 0.5 s of the start [deg].
    pub roll_excursion_deg: f64,
    /// Sign of the target roll rate: the direction the maneuver is meant to turn.
    pub expected_sign: f64,
    pub sign_matches: bool,
    pub time_to_150_deg: Option<f64>,
    pub time_to_180_deg: Option<f64>,
    /// Largest roll beyond 180° after the start [deg]; zero if never reached.
    pub overshoot_deg: f64,
    /// RMS of `ω_B,x − φ̇_r` over `[t₀, t₀ + 2T]` [rad/s].
    pub roll_rate_rms: f64,
    pub roll_rate_cost: f64,
    pub peak_roll_rate: f64,
    pub euler_roll_range_deg: [f64; 2],
}

/// Window after `t₀` in which the half turn must happen.
pub const PERCH_WINDOW: f64 = 0.5;

pub fn perch_metrics(trace: &Trace, maneuver: &ManeuverParams, params: &ModelParams) -> PerchMetrics {
    let (t0, ramp) = (maneuver.start, maneuver.ramp);
    let roll = trace.integrated_roll();
    let base_idx = trace.rows.iter().position(|r| r.t >= t0 - 1e-12);
    let base = base_idx.map(|i| roll[i]).unwrap_or(0.0);
    let after: Vec<(f64, f64)> = trace
        .rows
        .iter()
        .zip(&roll)
        .filter(|(r, _)| r.t >= t0 - 1e-12)
        .map(|(r, phi)| (r.t - t0, phi - base))
        .collect();
    let in_window = after.iter().filter(|(dt, _)| *dt <= PERCH_WINDOW + 1e-12);
    let excursion = in_window.clone().map(|&(_, p)| p).fold(0.0, |a: f64, p| if p.abs() > a.abs() { p } else { a });
    let first = |deg: f64| after.iter().find(|(_, p)| p.abs() >= deg.to_radians()).map(|&(dt, _)| dt);
    let max_after = after.iter().map(|(_, p)| p.abs()).fold(0.0, f64::max);
    let expected_sign = roll_reference(t0 + ramp, t0, ramp).1.signum();

    let window: Vec<&TraceRow> = trace.window(t0, t0 + 2.0 * ramp).collect();
    let cost = perch_cost_of_trace(trace, t0, ramp);
    let euler = trace.unwrapped_roll();
    PerchMetrics {
        start: t0,
        start_phase_percent: 100.0 * maneuver.start_phase(params),
        roll_excursion_deg: excursion.to_degrees(),
        expected_sign,
        sign_matches: excursion != 0.0 && excursion.signum() == expected_sign,
        time_to_150_deg: first(150.0),
        time_to_180_deg: first(180.0),
        overshoot_deg: (max_after.to_degrees() - 180.0).max(0.0),
        roll_rate_rms: (cost / window.len().max(1) as f64).sqrt(),
        roll_rate_cost: cost,
        peak_roll_rate: window.iter().map(|r| r.omega().x).fold(0.0, |a: f64, w| if w.abs() > a.abs() { w } else { a }),
        euler_roll_range_deg: [
            euler.iter().copied().fold(f64::MAX, f64::min).to_degrees(),
            euler.iter().copied().fold(f64::MIN, f64::max).to_degrees(),
        ],
    }
}

/// Torque-mode tracking compared with the constrained run of the same reference.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PidMetrics {
    pub pid: RunSummary,
    pub constrained: RunSummary,
    /// Extremes of `∫ ω_B,x dt` over the PID run [deg].
    pub roll_min_deg: f64,
    pub roll_max_deg: f64,
    pub reached_minus_150_deg: bool,
    pub reached_minus_180_deg: bool,
    /// RMS of `θ − θ_ref` over the recorded rows [rad].
    pub tracking_rms_pid: f64,
    pub tracking_rms_constrained: f64,
    /// Largest `|θ − θ_ref|` over the PID run [rad].
    pub max_joint_error_pid: f64,
}

pub fn pid_metrics(pid: &Trace, constrained: &Trace, reference: &Reference) -> PidMetrics {
    let roll = pid.integrated_roll();
    let lo = roll.iter().copied().fold(0.0, f64::min);
    let hi = roll.iter().copied().fold(0.0, f64::max);
    let max_err = pid.rows.iter().map(|r| (r.joints() - reference.at(r.t).theta).amax()).fold(0.0, f64::max);
    PidMetrics {
        pid: RunSummary::of(pid),
        constrained: RunSummary::of(constrained),
        roll_min_deg: lo.to_degrees(),
        roll_max_deg: hi.to_degrees(),
        reached_minus_150_deg: lo.to_degrees() <= -150.0,
        reached_minus_180_deg: lo.to_degrees() <= -180.0,
        tracking_rms_pid: tracking_rms(pid, reference),
        tracking_rms_constrained: tracking_rms(constrained, reference),
        max_joint_error_pid: max_err,
    }
}
