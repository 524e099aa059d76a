//! Parameters, state and kinematics of the five-body model.

mod kinematics;
mod params;
pub mod rotation;
mod state;

pub use kinematics::{
    angular_velocities, com_positions, velocity_jacobians, wing_rotations, BodyKinematics, Jacobian, Kinematics,
    PointKinematics, WingKinematics,
};
pub use params::ModelParams;
pub use rotation::{euler_zyx, orthonormality_error, rot_x, rot_z, skew};
pub use state::{idx, JointAngles, JointVector, QdVector, Side, State, NJ, NQD};
