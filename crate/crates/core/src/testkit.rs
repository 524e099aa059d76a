//! Helpers shared by unit, integration and acceptance tests.
//!
//! Not part of the supported API.

use nalgebra::{Matrix3, Vector3};
use rand::Rng;

use crate::model::{JointAngles, QdVector, State};

/// Rotation matrix `exp(S(phi))` by Rodrigues' formula.
pub fn exp_so3(phi: &Vector3<f64>) -> Matrix3<f64> {
    let angle = phi.norm();
    let k = crate::model::skew(phi);
    if angle < 1e-12 {
        return Matrix3::identity() + k;
    }
    Matrix3::identity() + k * (angle.sin() / angle) + k * k * ((1.0 - angle.cos()) / (angle * angle))
}

pub fn random_rotation<R: Rng>(rng: &mut R) -> Matrix3<f64> {
    let phi = Vector3::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
    exp_so3(&phi)
}

/// A state with arbitrary attitude, joint angles within ±1.5 rad and
/// quasi-velocities of order `rate`.
pub fn random_state<R: Rng>(rng: &mut R, rate: f64) -> State {
    let mut angles = || JointAngles::from_array(std::array::from_fn(|_| rng.random_range(-1.5..1.5)));
    let theta_left = angles();
    let theta_right = angles();
    State {
        rotation: random_rotation(rng),
        position: Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
        theta_left,
        theta_right,
        qd: QdVector::from_fn(|_, _| rng.random_range(-rate..rate)),
    }
}

/// Configuration reached after flowing for `h` seconds with frozen
/// quasi-velocities.
pub fn flow(state: &State, h: f64) -> State {
    let mut next = state.clone();
    next.rotation = state.rotation * exp_so3(&(state.omega() * h));
    next.position += state.velocity() * h;
    let joints = state.joints() + state.joint_rates() * h;
    next.set_joints(&joints);
    next
}

pub fn rel_err(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / b.abs().max(floor)
}
