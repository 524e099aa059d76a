use nalgebra::{Matrix3, SVector, Vector3};
use serde::{Deserialize, Serialize};

/// Number of quasi-velocities: body rate (3), body velocity (3), 4 joints per wing.
pub const NQD: usize = 14;
/// Number of actuated joints.
pub const NJ: usize = 8;

pub type QdVector = SVector<f64, NQD>;
pub type JointVector = SVector<f64, NJ>;

/// Offsets into the quasi-velocity vector.
pub mod idx {
    pub const OMEGA: usize = 0;
    pub const VEL: usize = 3;
    pub const LEFT: usize = 6;
    pub const RIGHT: usize = 10;
    pub const JOINTS: usize = 6;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Left, Side::Right];

    /// Offset of this side's joint rates in the quasi-velocity vector.
    pub fn qd_offset(self) -> usize {
        match self {
            Side::Left => idx::LEFT,
            Side::Right => idx::RIGHT,
        }
    }

    /// Offset of this side's joints in an 8-vector of joint quantities.
    pub fn joint_offset(self) -> usize {
        self.qd_offset() - idx::JOINTS
    }

    /// Sign mapping a left-wing joint reference onto this side.
    ///
    /// Negating every angle reflects the wing across the body x–z plane, so a
    /// gait copied this way is mirror symmetric, while an offset added equally
    /// to both wings in joint coordinates is not.
    pub fn reference_signs(self) -> [f64; 4] {
        match self {
            Side::Left => [1.0; 4],
            Side::Right => [-1.0; 4],
        }
    }
}

/// Joint angles of one wing in radians.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct JointAngles {
    pub plunge: f64,
    pub mediolateral: f64,
    pub elbow: f64,
    pub feathering: f64,
}

impl JointAngles {
    pub fn new(plunge: f64, mediolateral: f64, elbow: f64, feathering: f64) -> Self {
        Self { plunge, mediolateral, elbow, feathering }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.plunge, self.mediolateral, self.elbow, self.feathering]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn from_slice(s: &[f64]) -> Self {
        Self::new(s[0], s[1], s[2], s[3])
    }
}

/// Full configuration plus quasi-velocities.
///
/// `qd = [ω_B (body frame), ṗ_B (inertial), θ̇_L, θ̇_R]`.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub rotation: Matrix3<f64>,
    pub position: Vector3<f64>,
    pub theta_left: JointAngles,
    pub theta_right: JointAngles,
    pub qd: QdVector,
}

impl State {
    pub fn rest() -> Self {
        Self {
            rotation: Matrix3::identity(),
            position: Vector3::zeros(),
            theta_left: JointAngles::default(),
            theta_right: JointAngles::default(),
            qd: QdVector::zeros(),
        }
    }

    pub fn theta(&self, side: Side) -> &JointAngles {
        match side {
            Side::Left => &self.theta_left,
            Side::Right => &self.theta_right,
        }
    }

    pub fn joints(&self) -> JointVector {
        let mut v = JointVector::zeros();
        v.fixed_rows_mut::<4>(0).copy_from_slice(&self.theta_left.as_array());
        v.fixed_rows_mut::<4>(4).copy_from_slice(&self.theta_right.as_array());
        v
    }

    pub fn set_joints(&mut self, j: &JointVector) {
        self.theta_left = JointAngles::from_slice(&j.as_slice()[0..4]);
        self.theta_right = JointAngles::from_slice(&j.as_slice()[4..8]);
    }

    pub fn omega(&self) -> Vector3<f64> {
        self.qd.fixed_rows::<3>(idx::OMEGA).into_owned()
    }

    pub fn velocity(&self) -> Vector3<f64> {
        self.qd.fixed_rows::<3>(idx::VEL).into_owned()
    }

    pub fn joint_rates(&self) -> JointVector {
        self.qd.fixed_rows::<NJ>(idx::JOINTS).into_owned()
    }

    pub fn is_finite(&self) -> bool {
        self.rotation.iter().all(|v| v.is_finite())
            && self.position.iter().all(|v| v.is_finite())
            && self.joints().iter().all(|v| v.is_finite())
            && self.qd.iter().all(|v| v.is_finite())
    }
}
