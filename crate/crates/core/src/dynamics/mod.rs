//! Equations of motion `M q̇_d + h = B_a u_a + B_m u_m (+ J_cᵀ λ)`.
//!
//! `M` and `h` are assembled body by body from the velocity Jacobians and the
//! velocity-product accelerations in [`Kinematics`]: projecting each body's
//! Newton–Euler equations onto the quasi-velocities gives
//!
//! ```text
//! M = Σ m Jvᵀ Jv + Jωᵀ Î Jω
//! h = Σ m Jvᵀ (a_bias + g e_z) + Jωᵀ (Î α_bias + ω × Î ω)
//! ```
//!
//! which is the SO(3) Euler–Lagrange system with the body angular velocity as
//! quasi-velocity; the gyroscopic and `Σ r_j × ∂L/∂r_j` terms are already
//! contained in the bias accelerations.

use nalgebra::{Cholesky, SMatrix, Vector3};

use crate::error::{Error, Result};
use crate::model::{idx, velocity_jacobians, JointVector, Kinematics, ModelParams, QdVector, State, NJ, NQD};

pub type MassMatrix = SMatrix<f64, NQD, NQD>;
pub type ConstraintJacobian = SMatrix<f64, NJ, NQD>;

/// `B_m = [0_{8×6}, I_8]ᵀ`.
pub fn motor_input_map() -> SMatrix<f64, NQD, NJ> {
    let mut b = SMatrix::<f64, NQD, NJ>::zeros();
    for j in 0..NJ {
        b[(idx::JOINTS + j, j)] = 1.0;
    }
    b
}

/// `J_c = [0_{8×6}, I_8]`: selects the joint accelerations.
pub fn constraint_jacobian() -> ConstraintJacobian {
    motor_input_map().transpose()
}

/// Generalized force of joint torques, `B_m u_m`.
pub fn motor_forces(u_m: &JointVector) -> QdVector {
    let mut q = QdVector::zeros();
    q.fixed_rows_mut::<NJ>(idx::JOINTS).copy_from(u_m);
    q
}

/// Commanded joint accelerations `θ̈_c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintSpec {
    pub theta_ddot: JointVector,
}

#[derive(Debug, Clone)]
pub struct EomTerms {
    pub mass: MassMatrix,
    pub bias: QdVector,
}

impl EomTerms {
    pub fn new(kin: &Kinematics, params: &ModelParams) -> Self {
        let mut mass = MassMatrix::zeros();
        let mut bias = QdVector::zeros();
        let gravity = Vector3::new(0.0, 0.0, params.gravity);
        for (b, m, inertia) in kin.bodies(params) {
            let jv_t = b.jv.transpose();
            let jw_t = b.jw.transpose();
            let i_jw = SMatrix::<f64, 3, 3>::from_diagonal(&inertia) * b.jw;
            mass += (jv_t * b.jv) * m + jw_t * i_jw;
            let spin = inertia.component_mul(&b.omega);
            bias += jv_t * ((b.accel_bias + gravity) * m)
                + jw_t * (inertia.component_mul(&b.alpha_bias) + b.omega.cross(&spin));
        }
        // Exact symmetry; the products above agree only to rounding.
        let mass = (mass + mass.transpose()) * 0.5;
        Self { mass, bias }
    }

    pub fn at(state: &State, params: &ModelParams) -> Self {
        Self::new(&velocity_jacobians(state, params), params)
    }

    fn factor(&self) -> Result<Cholesky<f64, nalgebra::Const<NQD>>> {
        Cholesky::new(self.mass).ok_or(Error::MassMatrixNotPositiveDefinite)
    }

    /// Unconstrained accelerations `M⁻¹ (u − h)`.
    pub fn forward(&self, u_total: &QdVector) -> Result<QdVector> {
        Ok(self.factor()?.solve(&(u_total - self.bias)))
    }

    /// Constrained accelerations and multipliers such that
    /// `M q̈ + h = u + J_cᵀ λ` and `J_c q̈ = θ̈_c`.
    ///
    /// `J_c` selects the joint rows, so the joint accelerations are set to
    /// `θ̈_c` directly and only the 6×6 base block is factored:
    /// `M_bb q̈_b = u_b − h_b − M_bj θ̈_c`, then `λ = M_jb q̈_b + M_jj θ̈_c + h_j − u_j`.
    /// This is the Schur-complement solution written in block form.
    pub fn constrained(&self, u_total: &QdVector, constraint: &ConstraintSpec) -> Result<(JointVector, QdVector)> {
        const NB: usize = idx::JOINTS;
        let m_bb = self.mass.fixed_view::<NB, NB>(0, 0).into_owned();
        let m_bj = self.mass.fixed_view::<NB, NJ>(0, NB).into_owned();
        let m_jb = self.mass.fixed_view::<NJ, NB>(NB, 0).into_owned();
        let m_jj = self.mass.fixed_view::<NJ, NJ>(NB, NB).into_owned();
        let rhs = (u_total - self.bias).fixed_rows::<NB>(0) - m_bj * constraint.theta_ddot;
        let base = Cholesky::new(m_bb).ok_or(Error::SingularConstraint)?.solve(&rhs);
        let lambda =
            m_jb * base + m_jj * constraint.theta_ddot + self.bias.fixed_rows::<NJ>(NB) - u_total.fixed_rows::<NJ>(NB);
        let mut qdd = QdVector::zeros();
        qdd.fixed_rows_mut::<NB>(0).copy_from(&base);
        qdd.fixed_rows_mut::<NJ>(NB).copy_from(&constraint.theta_ddot);
        Ok((lambda, qdd))
    }
}

pub fn mass_matrix(state: &State, params: &ModelParams) -> MassMatrix {
    EomTerms::at(state, params).mass
}

pub fn bias_vector(state: &State, params: &ModelParams) -> QdVector {
    EomTerms::at(state, params).bias
}

pub fn forward_dynamics(state: &State, params: &ModelParams, u_total: &QdVector) -> Result<QdVector> {
    EomTerms::at(state, params).forward(u_total)
}

pub fn lagrange_multiplier(
    state: &State,
    params: &ModelParams,
    u_total: &QdVector,
    constraint: &ConstraintSpec,
) -> Result<(JointVector, QdVector)> {
    EomTerms::at(state, params).constrained(u_total, constraint)
}

/// Kinetic energy `Σ ½ m ṗᵀṗ + ½ ωᵀ Î ω`.
pub fn kinetic_energy(kin: &Kinematics, params: &ModelParams) -> f64 {
    kin.bodies(params)
        .iter()
        .map(|(b, m, inertia)| {
            0.5 * m * b.velocity.norm_squared() + 0.5 * b.omega.dot(&inertia.component_mul(&b.omega))
        })
        .sum()
}

/// Gravitational potential `Σ m g p_z`.
pub fn potential_energy(kin: &Kinematics, params: &ModelParams) -> f64 {
    kin.bodies(params).iter().map(|(b, m, _)| m * params.gravity * b.position.z).sum()
}

#[cfg(test)]
mod tests;
