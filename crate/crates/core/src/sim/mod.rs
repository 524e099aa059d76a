//! Time integration, diagnostics and trace recording.
//!
//! A run advances [`State`] with [`rk4_step`] at a fixed step, asking a
//! [`JointDrive`] for joint commands at every stage. Prescribed joint
//! accelerations go through the Lagrange-multiplier solve; torques go through
//! the unconstrained forward dynamics.

mod diagnostics;
mod drive;
mod integrator;
mod pid;

pub use diagnostics::{angular_momentum, com_of, energy, momentum_of, system_com};
pub use drive::{GaitDrive, JointCommand, JointDrive, LockedJoints, Passive, PdDrive, PidDrive, Reference};
pub use integrator::{reorthonormalize, rk4_step, StateRate};
pub use pid::{pid_torque, PidGains, PidState, INTEGRAL_CLAMP};

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::aero::{aero_forces, WindField};
use crate::dynamics::{constraint_jacobian, kinetic_energy, motor_forces, potential_energy, ConstraintSpec, EomTerms};
use crate::error::{Error, Result};
use crate::gait::JointReference;
use crate::model::{euler_zyx, idx, velocity_jacobians, JointAngles, ModelParams, QdVector, State, NJ};

pub const DEFAULT_DT: f64 = 1e-4;
pub const DEFAULT_RECORD_STRIDE: usize = 10;
pub const DEFAULT_HORIZON: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Integration step [s].
    pub dt: f64,
    /// Horizon [s].
    pub t_end: f64,
    pub wind: WindField,
    /// Integration steps per recorded row.
    pub record_stride: usize,
    /// RK4 sub-steps per `dt`. Controllers still update once per `dt`.
    pub substeps: usize,
    /// Quasi-steady aerodynamic loads on or off.
    pub aero: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: DEFAULT_DT,
            t_end: DEFAULT_HORIZON,
            wind: WindField::new(-2.0, 0.0, 0.0),
            record_stride: DEFAULT_RECORD_STRIDE,
            substeps: 1,
            aero: true,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= self.dt) {
            return Err(Error::InvalidConfig(format!("t_end = {} is shorter than dt = {}", self.t_end, self.dt)));
        }
        if self.record_stride == 0 {
            return Err(Error::InvalidConfig("record_stride must be at least 1".into()));
        }
        if self.substeps == 0 {
            return Err(Error::InvalidConfig("substeps must be at least 1".into()));
        }
        if !self.wind.velocity.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidConfig("wind must be finite".into()));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub rotation: Matrix3<f64>,
    pub position: Vector3<f64>,
    pub theta_left: JointAngles,
    pub theta_right: JointAngles,
    pub qd: QdVector,
    /// Angular momentum about the system CoM [kg·m²/s].
    pub momentum: Vector3<f64>,
    /// `T + U` [J].
    pub energy: f64,
    /// `[roll, pitch, yaw]` [rad], Z-Y-X.
    pub euler: [f64; 3],
    /// Accumulated non-conservative work since t = 0 [J].
    pub work: f64,
}

impl TraceRow {
    pub fn new(t: f64, state: &State, params: &ModelParams, work: f64) -> Self {
        let kin = velocity_jacobians(state, params);
        Self {
            t,
            rotation: state.rotation,
            position: state.position,
            theta_left: state.theta_left,
            theta_right: state.theta_right,
            qd: state.qd,
            momentum: momentum_of(&kin, params),
            energy: kinetic_energy(&kin, params) + potential_energy(&kin, params),
            euler: euler_zyx(&state.rotation),
            work,
        }
    }

    pub fn state(&self) -> State {
        State {
            rotation: self.rotation,
            position: self.position,
            theta_left: self.theta_left,
            theta_right: self.theta_right,
            qd: self.qd,
        }
    }

    pub fn joints(&self) -> nalgebra::SVector<f64, NJ> {
        self.state().joints()
    }

    pub fn omega(&self) -> Vector3<f64> {
        self.qd.fixed_rows::<3>(idx::OMEGA).into_owned()
    }

    pub fn velocity(&self) -> Vector3<f64> {
        self.qd.fixed_rows::<3>(idx::VEL).into_owned()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub rows: Vec<TraceRow>,
    /// Why the run stopped early, if it did.
    pub failure: Option<Error>,
    /// Largest `‖J_c q̈ − θ̈_c‖∞` seen at any derivative evaluation.
    pub max_constraint_residual: f64,
}

impl Trace {
    pub fn completed(&self) -> bool {
        self.failure.is_none()
    }

    pub fn last(&self) -> &TraceRow {
        self.rows.last().expect("trace always holds the initial row")
    }

    /// Roll angle with 2π jumps removed, so a half turn reads as ±π.
    pub fn unwrapped_roll(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.rows.len());
        let mut offset = 0.0;
        let mut prev: Option<f64> = None;
        for row in &self.rows {
            let raw = row.euler[0];
            if let Some(p) = prev {
                let jump = raw - p;
                if jump > std::f64::consts::PI {
                    offset -= 2.0 * std::f64::consts::PI;
                } else if jump < -std::f64::consts::PI {
                    offset += 2.0 * std::f64::consts::PI;
                }
            }
            prev = Some(raw);
            out.push(raw + offset);
        }
        out
    }

    /// `∫ ω_B,x dt` by the trapezoid rule over the recorded rows.
    ///
    /// The Z-Y-X roll angle jumps by π whenever the pitch passes ±90°, which
    /// a flapping body does routinely; the integrated body roll rate has no
    /// such jumps and measures how far the body has turned about its own
    /// longitudinal axis.
    pub fn integrated_roll(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.rows.len());
        let mut acc = 0.0;
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                let prev = &self.rows[i - 1];
                acc += 0.5 * (row.t - prev.t) * (row.omega().x + prev.omega().x);
            }
            out.push(acc);
        }
        out
    }

    /// Rows with `lo ≤ t ≤ hi`.
    pub fn window(&self, lo: f64, hi: f64) -> impl Iterator<Item = &TraceRow> {
        self.rows.iter().filter(move |r| r.t >= lo && r.t <= hi)
    }
}

/// Rest configuration with the joints placed on the reference.
pub fn initial_state(reference: &JointReference) -> State {
    let mut s = State::rest();
    s.set_joints(&reference.theta);
    s.qd.fixed_rows_mut::<NJ>(idx::JOINTS).copy_from(&reference.rate);
    s
}

/// Quasi-accelerations and non-conservative power at one instant.
pub fn state_rate(
    state: &State,
    command: &JointCommand,
    config: &SimConfig,
    params: &ModelParams,
) -> Result<(StateRate, f64)> {
    let kin = velocity_jacobians(state, params);
    let eom = EomTerms::new(&kin, params);
    let u_aero = if config.aero { aero_forces(&kin, &config.wind, params).0 } else { QdVector::zeros() };
    let (qdd, generalized, residual) = match command {
        JointCommand::Torque(u_m) => {
            let u = u_aero + motor_forces(u_m);
            (eom.forward(&u)?, u, 0.0)
        }
        JointCommand::Acceleration(theta_ddot) => {
            let spec = ConstraintSpec { theta_ddot: *theta_ddot };
            let (lambda, qdd) = eom.constrained(&u_aero, &spec)?;
            let jc = constraint_jacobian();
            let residual = (jc * qdd - theta_ddot).amax();
            (qdd, u_aero + jc.transpose() * lambda, residual)
        }
    };
    let power = state.qd.dot(&generalized);
    Ok((StateRate::kinematic(state, qdd, power), residual))
}

/// Integrates from `initial` over the configured horizon.
///
/// A run that blows up returns the rows recorded so far with `failure` set.
pub fn run_simulation(config: &SimConfig, params: &ModelParams, drive: &mut dyn JointDrive, initial: &State) -> Trace {
    let mut trace = Trace { rows: Vec::new(), failure: None, max_constraint_residual: 0.0 };
    if let Err(e) = config.validate().and_then(|_| params.validate()) {
        trace.failure = Some(e);
        return trace;
    }
    let mut state = initial.clone();
    let mut work = 0.0;
    trace.rows.push(TraceRow::new(0.0, &state, params, work));
    let mut residual = 0.0f64;
    for k in 0..config.steps() {
        let t = k as f64 * config.dt;
        drive.begin_step(t, &state, config.dt);
        let h = config.dt / config.substeps as f64;
        let mut step = Ok(());
        for j in 0..config.substeps {
            let tau0 = t + j as f64 * h;
            match rk4_step(&state, tau0, h, |tau, s| {
                let command = drive.command(tau, s);
                let (rate, r) = state_rate(s, &command, config, params)?;
                residual = residual.max(r);
                Ok(rate)
            }) {
                Ok((next, dw)) => {
                    state = next;
                    work += dw;
                }
                Err(e) => {
                    step = Err(e);
                    break;
                }
            }
        }
        if let Err(e) = step {
            trace.failure = Some(e);
            break;
        }
        if (k + 1) % config.record_stride == 0 {
            trace.rows.push(TraceRow::new((k + 1) as f64 * config.dt, &state, params, work));
        }
    }
    trace.max_constraint_residual = residual;
    trace
}

/// Open-loop gait from rest on the reference.
pub fn simulate_gait(config: &SimConfig, params: &ModelParams, reference: Reference) -> Trace {
    let initial = initial_state(&reference.at(0.0));
    run_simulation(config, params, &mut GaitDrive(reference), &initial)
}

/// Gait plus maneuver offset under the PD acceleration closure.
pub fn simulate_maneuver(config: &SimConfig, params: &ModelParams, reference: Reference) -> Trace {
    let initial = initial_state(&reference.at(0.0));
    run_simulation(config, params, &mut PdDrive(reference), &initial)
}

/// Torque-controlled tracking of the reference with a PID loop.
pub fn simulate_pid(config: &SimConfig, params: &ModelParams, reference: Reference, gains: PidGains) -> Trace {
    let initial = initial_state(&reference.at(0.0));
    run_simulation(config, params, &mut PidDrive::new(reference, gains), &initial)
}

/// RMS over recorded rows and joints of `θ − θ_ref`.
pub fn tracking_rms(trace: &Trace, reference: &Reference) -> f64 {
    let mut sum = 0.0;
    let mut n = 0usize;
    for row in &trace.rows {
        let e = row.joints() - reference.at(row.t).theta;
        sum += e.norm_squared();
        n += NJ;
    }
    if n == 0 {
        0.0
    } else {
        (sum / n as f64).sqrt()
    }
}
