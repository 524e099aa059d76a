use nalgebra::Vector3;

use crate::dynamics::{kinetic_energy, potential_energy};
use crate::model::{velocity_jacobians, Kinematics, ModelParams, State};

/// Mass-weighted mean of the five body CoMs.
pub fn system_com(state: &State, params: &ModelParams) -> Vector3<f64> {
    com_of(&velocity_jacobians(state, params), params)
}

pub fn com_of(kin: &Kinematics, params: &ModelParams) -> Vector3<f64> {
    let weighted: Vector3<f64> = kin.bodies(params).iter().map(|(b, m, _)| b.position * *m).sum();
    weighted / params.total_mass()
}

/// Total angular momentum about the system CoM, inertial frame:
/// `Π = Σ R_F Î_F ω_F + m_F (p_F − p_CoM) × ṗ_F`.
pub fn angular_momentum(state: &State, params: &ModelParams) -> Vector3<f64> {
    momentum_of(&velocity_jacobians(state, params), params)
}

pub fn momentum_of(kin: &Kinematics, params: &ModelParams) -> Vector3<f64> {
    let com = com_of(kin, params);
    kin.bodies(params)
        .iter()
        .map(|(b, m, inertia)| {
            let spin = b.rotation * inertia.component_mul(&b.omega);
            spin + (b.position - com).cross(&(b.velocity * *m))
        })
        .sum()
}

/// Mechanical energy `T + U`.
pub fn energy(state: &State, params: &ModelParams) -> f64 {
    let kin = velocity_jacobians(state, params);
    kinetic_energy(&kin, params) + potential_energy(&kin, params)
}
