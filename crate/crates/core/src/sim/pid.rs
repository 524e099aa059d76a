use serde::{Deserialize, Serialize};

use crate::model::JointVector;

/// Bound on the magnitude of the integral term, per joint [N·m].
pub const INTEGRAL_CLAMP: f64 = 0.05;

/// Gains shared by all eight joints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PidGains {
    /// [N·m/rad]
    pub kp: f64,
    /// [N·m/(rad·s)]
    pub ki: f64,
    /// [N·m·s/rad]
    pub kd: f64,
}

impl PidGains {
    /// The low-gain controller of the closed-loop experiment.
    pub fn baseline() -> Self {
        Self { kp: 0.0012, ki: 0.006, kd: 0.0012 }
    }

    pub fn scaled(self, factor: f64) -> Self {
        Self { kp: self.kp * factor, ki: self.ki * factor, kd: self.kd * factor }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PidState {
    pub gains: PidGains,
    /// `∫ e dt` per joint [rad·s].
    pub integral: JointVector,
}

impl PidState {
    pub fn new(gains: PidGains) -> Self {
        Self { gains, integral: JointVector::zeros() }
    }

    pub fn reset(&mut self) {
        self.integral = JointVector::zeros();
    }
}

/// `u = −k_p e − k_i ∫e − k_d ė`, `e = θ − θ_ref`, accumulating the integral by
/// the rectangle rule before use. The integral term is held within
/// ±[`INTEGRAL_CLAMP`].
pub fn pid_torque(
    pid: &mut PidState,
    theta: &JointVector,
    theta_dot: &JointVector,
    theta_ref: &JointVector,
    theta_dot_ref: &JointVector,
    dt: f64,
) -> JointVector {
    let g = pid.gains;
    let e = theta - theta_ref;
    let e_dot = theta_dot - theta_dot_ref;
    pid.integral += e * dt;
    if g.ki > 0.0 {
        let limit = INTEGRAL_CLAMP / g.ki;
        pid.integral.apply(|v| *v = v.clamp(-limit, limit));
    }
    -(e * g.kp) - pid.integral * g.ki - e_dot * g.kd
}
