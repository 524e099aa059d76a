//! Parametric joint references: the flapping gait, the triangular offset
//! used for the perching maneuver, the PD acceleration closure and the target
//! roll profile.

use serde::{Deserialize, Serialize};

use crate::model::{JointVector, ModelParams, Side};

/// Gain of the PD acceleration closure, both terms.
pub const PD_GAIN: f64 = 120.0;

/// Default ramp period of the maneuver: two wingbeats at 10 Hz.
pub const DEFAULT_RAMP: f64 = 0.2;

/// The published zero-angular-momentum gait in degrees, ordered as
/// [`GaitParams::to_vec`].
pub const ZERO_MOMENTUM_DEG: [f64; 11] = [-75.3, -16.2, -50.7, -9.2, 45.0, 17.3, 27.2, 29.1, -91.0, -112.0, -92.5];

/// Start time [s] and joint offsets [deg] of the published perching maneuver.
pub const PERCHING_START: f64 = 1.0724;
pub const PERCHING_OFFSET_DEG: [f64; 4] = [-55.7, 0.0, 0.0, -16.6];

/// Left-wing gait `θ_j(t) = A_j cos(Ωt + φ_j) + θ̄_j` for the joints
/// (plunge, mediolateral, elbow, feathering). Plunge has no phase; the three
/// phases are relative to it. Radians throughout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaitParams {
    pub mean: [f64; 4],
    pub amplitude: [f64; 4],
    /// Phases of mediolateral, elbow and feathering.
    pub phase: [f64; 3],
}

impl GaitParams {
    pub const DIM: usize = 11;

    /// The published zero-angular-momentum gait.
    pub fn zero_momentum() -> Self {
        Self::from_degrees(&ZERO_MOMENTUM_DEG)
    }

    pub fn from_degrees(k: &[f64; 11]) -> Self {
        Self::from_vec(&k.map(f64::to_radians))
    }

    /// `[θ̄_p, θ̄_m, θ̄_e, θ̄_f, A_p, A_m, A_e, A_f, φ_m, φ_e, φ_f]`.
    pub fn from_vec(k: &[f64]) -> Self {
        assert_eq!(k.len(), Self::DIM);
        Self { mean: [k[0], k[1], k[2], k[3]], amplitude: [k[4], k[5], k[6], k[7]], phase: [k[8], k[9], k[10]] }
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.mean.iter().chain(&self.amplitude).chain(&self.phase).copied().collect()
    }

    fn phase_of(&self, joint: usize) -> f64 {
        if joint == 0 {
            0.0
        } else {
            self.phase[joint - 1]
        }
    }
}

/// Maneuver `k₂ = [t₀, d]` plus its ramp period `T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ManeuverParams {
    pub start: f64,
    pub offset: [f64; 4],
    pub ramp: f64,
}

impl ManeuverParams {
    pub const DIM: usize = 5;

    /// The published perching maneuver.
    pub fn perching() -> Self {
        Self { start: PERCHING_START, offset: PERCHING_OFFSET_DEG.map(f64::to_radians), ramp: DEFAULT_RAMP }
    }

    pub fn from_vec(k: &[f64], ramp: f64) -> Self {
        assert_eq!(k.len(), Self::DIM);
        Self { start: k[0], offset: [k[1], k[2], k[3], k[4]], ramp }
    }

    pub fn to_vec(&self) -> Vec<f64> {
        std::iter::once(self.start).chain(self.offset).collect()
    }

    pub fn end(&self) -> f64 {
        self.start + 2.0 * self.ramp
    }

    /// Where in the wingbeat the maneuver starts, as a fraction in [0, 1).
    pub fn start_phase(&self, params: &ModelParams) -> f64 {
        let beat = params.wingbeat();
        (self.start / beat).rem_euclid(1.0)
    }
}

/// Joint angles, rates and accelerations for both wings (left then right).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointReference {
    pub theta: JointVector,
    pub rate: JointVector,
    pub accel: JointVector,
}

/// Gait reference at `t`. The right wing is the mirror image of the left.
pub fn joint_reference(t: f64, k1: &GaitParams, params: &ModelParams) -> JointReference {
    let w = params.flap_rate();
    let mut r = JointReference { theta: JointVector::zeros(), rate: JointVector::zeros(), accel: JointVector::zeros() };
    for side in Side::BOTH {
        let o = side.joint_offset();
        let sign = side.reference_signs();
        for j in 0..4 {
            let (s, c) = (w * t + k1.phase_of(j)).sin_cos();
            let a = k1.amplitude[j];
            r.theta[o + j] = sign[j] * (a * c + k1.mean[j]);
            r.rate[o + j] = sign[j] * (-a * w * s);
            r.accel[o + j] = sign[j] * (-a * w * w * c);
        }
    }
    r
}

/// Triangular offset: rises at `d/T` from `t₀`, falls back at `−d/T` from
/// `t₀ + T`, zero outside `[t₀, t₀ + 2T)`.
pub fn offset_trajectory(t: f64, k2: &ManeuverParams) -> ([f64; 4], [f64; 4]) {
    let (t0, ramp) = (k2.start, k2.ramp);
    let (scale, slope) = if t < t0 || t >= t0 + 2.0 * ramp {
        (0.0, 0.0)
    } else if t < t0 + ramp {
        ((t - t0) / ramp, 1.0 / ramp)
    } else {
        ((t0 + 2.0 * ramp - t) / ramp, -1.0 / ramp)
    };
    (k2.offset.map(|d| d * scale), k2.offset.map(|d| d * slope))
}

/// Gait with the maneuver offset added to both wings' joint angles.
///
/// Offsets are equal in joint coordinates on both sides, so any component
/// whose right-wing reference sign is negative breaks the mirror symmetry.
/// Only angle and rate carry the offset; the acceleration stays the gait's.
pub fn maneuver_reference(t: f64, k1: &GaitParams, k2: &ManeuverParams, params: &ModelParams) -> JointReference {
    let mut r = joint_reference(t, k1, params);
    let (offset, rate) = offset_trajectory(t, k2);
    for side in Side::BOTH {
        let o = side.joint_offset();
        for j in 0..4 {
            r.theta[o + j] += offset[j];
            r.rate[o + j] += rate[j];
        }
    }
    r
}

/// `θ̈_c = −120 (θ − θ_r) − 120 (θ̇ − θ̇_r)`.
pub fn pd_acceleration_constraint(
    theta: &JointVector,
    theta_dot: &JointVector,
    reference: &JointReference,
) -> JointVector {
    -(theta - reference.theta) * PD_GAIN - (theta_dot - reference.rate) * PD_GAIN
}

/// Target roll `φ_r = (π/2) tanh η`, `η = 3(t − t₀)/T − 3`: a smooth 180°
/// turn over `[t₀, t₀ + 2T]`. Returns the angle and its exact time derivative.
pub fn roll_reference(t: f64, t0: f64, ramp: f64) -> (f64, f64) {
    let eta = 3.0 / ramp * (t - t0) - 3.0;
    let th = eta.tanh();
    let half_pi = std::f64::consts::FRAC_PI_2;
    (half_pi * th, half_pi * (3.0 / ramp) * (1.0 - th * th))
}

/// Joint-space distance helper used by tracking metrics.
pub fn joint_error(theta: &JointVector, reference: &JointReference) -> JointVector {
    theta - reference.theta
}
