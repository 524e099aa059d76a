use crate::gait::{
    joint_reference, maneuver_reference, pd_acceleration_constraint, GaitParams, JointReference, ManeuverParams,
};
use crate::model::{JointVector, ModelParams, State};

use super::pid::{pid_torque, PidGains, PidState};

/// What the joints are told to do during a derivative evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JointCommand {
    /// Motor torques `u_m`; joints move freely under them.
    Torque(JointVector),
    /// Prescribed joint accelerations `θ̈_c`, enforced by constraint forces.
    Acceleration(JointVector),
}

/// A source of joint commands.
///
/// `begin_step` is called once per integration step (zero-order hold
/// controllers update there); `command` is evaluated at every RK4 stage.
pub trait JointDrive {
    fn begin_step(&mut self, _t: f64, _state: &State, _dt: f64) {}
    fn command(&self, t: f64, state: &State) -> JointCommand;
}

/// Zero motor torque.
#[derive(Debug, Clone, Copy, Default)]
pub struct Passive;

impl JointDrive for Passive {
    fn command(&self, _t: f64, _state: &State) -> JointCommand {
        JointCommand::Torque(JointVector::zeros())
    }
}

/// Joints held at constant velocity (`θ̈ = 0`).
#[derive(Debug, Clone, Copy, Default)]
pub struct LockedJoints;

impl JointDrive for LockedJoints {
    fn command(&self, _t: f64, _state: &State) -> JointCommand {
        JointCommand::Acceleration(JointVector::zeros())
    }
}

/// Reference joint trajectory: the gait, optionally with the maneuver offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reference {
    pub gait: GaitParams,
    pub maneuver: Option<ManeuverParams>,
    pub params: ModelParams,
}

impl Reference {
    pub fn gait(gait: GaitParams, params: &ModelParams) -> Self {
        Self { gait, maneuver: None, params: *params }
    }

    pub fn maneuver(gait: GaitParams, maneuver: ManeuverParams, params: &ModelParams) -> Self {
        Self { gait, maneuver: Some(maneuver), params: *params }
    }

    pub fn at(&self, t: f64) -> JointReference {
        match &self.maneuver {
            Some(m) => maneuver_reference(t, &self.gait, m, &self.params),
            None => joint_reference(t, &self.gait, &self.params),
        }
    }
}

/// Open-loop gait: joint accelerations taken from the analytic reference.
#[derive(Debug, Clone)]
pub struct GaitDrive(pub Reference);

impl JointDrive for GaitDrive {
    fn command(&self, t: f64, _state: &State) -> JointCommand {
        JointCommand::Acceleration(self.0.at(t).accel)
    }
}

/// Joint accelerations from the PD closure around the reference.
#[derive(Debug, Clone)]
pub struct PdDrive(pub Reference);

impl JointDrive for PdDrive {
    fn command(&self, t: f64, state: &State) -> JointCommand {
        let r = self.0.at(t);
        JointCommand::Acceleration(pd_acceleration_constraint(&state.joints(), &state.joint_rates(), &r))
    }
}

/// Torque control with a PID loop sampled once per step.
#[derive(Debug, Clone)]
pub struct PidDrive {
    pub reference: Reference,
    pub pid: PidState,
    torque: JointVector,
}

impl PidDrive {
    pub fn new(reference: Reference, gains: PidGains) -> Self {
        Self { reference, pid: PidState::new(gains), torque: JointVector::zeros() }
    }

    pub fn torque(&self) -> &JointVector {
        &self.torque
    }
}

impl JointDrive for PidDrive {
    fn begin_step(&mut self, t: f64, state: &State, dt: f64) {
        let r = self.reference.at(t);
        self.torque = pid_torque(&mut self.pid, &state.joints(), &state.joint_rates(), &r.theta, &r.rate, dt);
    }

    fn command(&self, _t: f64, _state: &State) -> JointCommand {
        JointCommand::Torque(self.torque)
    }
}
