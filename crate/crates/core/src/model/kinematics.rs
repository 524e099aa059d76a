//! Forward kinematics of the five-body chain.
//!
//! Every body carries its rotation, CoM position and velocity, its body-frame
//! angular velocity, the 3×14 Jacobians mapping the quasi-velocities onto
//! those velocities, and the velocity-product ("bias") accelerations that
//! remain when the quasi-velocity derivatives are zero. The dynamics are
//! assembled from nothing else.

use nalgebra::{Matrix3, SMatrix, Vector3};

use super::params::ModelParams;
use super::rotation::{rot_x, rot_z, skew};
use super::state::{idx, JointAngles, QdVector, Side, State, NQD};

pub type Jacobian = SMatrix<f64, 3, NQD>;

#[derive(Debug, Clone, PartialEq)]
pub struct BodyKinematics {
    /// Body-to-inertial rotation.
    pub rotation: Matrix3<f64>,
    pub position: Vector3<f64>,
    pub velocity: Vector3<f64>,
    /// Angular velocity in the body's own frame.
    pub omega: Vector3<f64>,
    /// Maps `qd` onto `velocity`.
    pub jv: Jacobian,
    /// Maps `qd` onto `omega`.
    pub jw: Jacobian,
    /// CoM acceleration (inertial) when `q̇_d = 0`.
    pub accel_bias: Vector3<f64>,
    /// Angular acceleration (body frame) when `q̇_d = 0`.
    pub alpha_bias: Vector3<f64>,
}

/// A material point that is not a CoM (the elbow joint).
#[derive(Debug, Clone, PartialEq)]
pub struct PointKinematics {
    pub position: Vector3<f64>,
    pub velocity: Vector3<f64>,
    pub jv: Jacobian,
    pub accel_bias: Vector3<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WingKinematics {
    pub side: Side,
    pub arm: BodyKinematics,
    pub wing: BodyKinematics,
    pub elbow: PointKinematics,
    /// Arm rotation relative to the body.
    pub arm_relative: Matrix3<f64>,
    /// Wing rotation relative to the arm.
    pub wing_relative: Matrix3<f64>,
    /// Wing angular velocity, inertial frame.
    pub wing_omega_inertial: Vector3<f64>,
    /// Maps `qd` onto `wing_omega_inertial`.
    pub wing_jw_inertial: Jacobian,
}

impl WingKinematics {
    /// Inertial position of the wing-plate point at `offset` (wing frame)
    /// from the elbow.
    pub fn point_position(&self, offset: &Vector3<f64>) -> Vector3<f64> {
        self.elbow.position + self.wing.rotation * offset
    }

    /// Inertial velocity of the wing-plate point at `offset` from the elbow.
    pub fn point_velocity(&self, offset: &Vector3<f64>) -> Vector3<f64> {
        self.elbow.velocity + self.wing_omega_inertial.cross(&(self.wing.rotation * offset))
    }

    /// Linear-velocity Jacobian of the wing-plate point at `offset`.
    pub fn point_jacobian(&self, offset: &Vector3<f64>) -> Jacobian {
        self.elbow.jv - skew(&(self.wing.rotation * offset)) * self.wing_jw_inertial
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Kinematics {
    pub body: BodyKinematics,
    pub left: WingKinematics,
    pub right: WingKinematics,
}

impl Kinematics {
    pub fn wing(&self, side: Side) -> &WingKinematics {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    /// The five bodies with their mass and principal inertia, in the order
    /// body, left arm, right arm, left wing, right wing.
    pub fn bodies<'a>(&'a self, params: &ModelParams) -> [(&'a BodyKinematics, f64, Vector3<f64>); 5] {
        [
            (&self.body, params.body_mass, params.body_inertia),
            (&self.left.arm, params.arm_mass, params.arm_inertia),
            (&self.right.arm, params.arm_mass, params.arm_inertia),
            (&self.left.wing, params.wing_mass, params.wing_inertia),
            (&self.right.wing, params.wing_mass, params.wing_inertia),
        ]
    }
}

/// Arm rotation relative to the body and wing rotation relative to the arm:
/// `R_A = R_z(θ_m) R_x(θ_p)`, `R_W = R_x(θ_e) R_z(θ_f)`, the same on both sides.
pub fn wing_rotations(theta: &JointAngles) -> (Matrix3<f64>, Matrix3<f64>) {
    let [p, m, e, f] = theta.as_array();
    (rot_z(m) * rot_x(p), rot_x(e) * rot_z(f))
}

/// Total angular velocities of the arms (body frame) and wings (arm frame),
/// returned as `(ω_AL^B, ω_WL^AL, ω_AR^B, ω_WR^AR)`.
pub fn angular_velocities(
    theta_left: &JointAngles,
    theta_right: &JointAngles,
    qd: &QdVector,
) -> (Vector3<f64>, Vector3<f64>, Vector3<f64>, Vector3<f64>) {
    let omega_b = qd.fixed_rows::<3>(idx::OMEGA).into_owned();
    let side_rates = |theta: &JointAngles, side: Side| {
        let o = side.qd_offset();
        let [_, m, e, _] = theta.as_array();
        let arm = Vector3::new(0.0, 0.0, qd[o + 1]) + rot_z(m) * Vector3::new(qd[o], 0.0, 0.0) + omega_b;
        let (arm_rel, _) = wing_rotations(theta);
        let wing = Vector3::new(qd[o + 2], 0.0, 0.0)
            + rot_x(e) * Vector3::new(0.0, 0.0, qd[o + 3])
            + arm_rel.transpose() * arm;
        (arm, wing)
    };
    let (al, wl) = side_rates(theta_left, Side::Left);
    let (ar, wr) = side_rates(theta_right, Side::Right);
    (al, wl, ar, wr)
}

/// CoM positions `(p_AL, p_WL, p_AR, p_WR)`.
pub fn com_positions(
    rotation: &Matrix3<f64>,
    position: &Vector3<f64>,
    theta_left: &JointAngles,
    theta_right: &JointAngles,
    params: &ModelParams,
) -> (Vector3<f64>, Vector3<f64>, Vector3<f64>, Vector3<f64>) {
    let side_positions = |theta: &JointAngles, side: Side| {
        let links = params.links(side);
        let (arm_rel, wing_rel) = wing_rotations(theta);
        let ra = rotation * arm_rel;
        let arm = position + rotation * links[0] + 0.5 * ra * links[1];
        let wing = arm + 0.5 * ra * links[1] + ra * wing_rel * links[2];
        (arm, wing)
    };
    let (al, wl) = side_positions(theta_left, Side::Left);
    let (ar, wr) = side_positions(theta_right, Side::Right);
    (al, wl, ar, wr)
}

/// Full kinematics of `state`, including Jacobians and bias accelerations.
pub fn velocity_jacobians(state: &State, params: &ModelParams) -> Kinematics {
    let rb = state.rotation;
    let omega_b = state.omega();
    let wb = rb * omega_b;

    let mut jb_inertial = Jacobian::zeros();
    jb_inertial.fixed_view_mut::<3, 3>(0, idx::OMEGA).copy_from(&rb);
    let mut body_jv = Jacobian::zeros();
    body_jv.fixed_view_mut::<3, 3>(0, idx::VEL).copy_from(&Matrix3::identity());
    let mut body_jw = Jacobian::zeros();
    body_jw.fixed_view_mut::<3, 3>(0, idx::OMEGA).copy_from(&Matrix3::identity());

    let body = BodyKinematics {
        rotation: rb,
        position: state.position,
        velocity: state.velocity(),
        omega: omega_b,
        jv: body_jv,
        jw: body_jw,
        accel_bias: Vector3::zeros(),
        alpha_bias: Vector3::zeros(),
    };

    let left = wing_side(state, params, Side::Left, &body, &jb_inertial, &wb);
    let right = wing_side(state, params, Side::Right, &body, &jb_inertial, &wb);
    Kinematics { body, left, right }
}

fn wing_side(
    state: &State,
    params: &ModelParams,
    side: Side,
    body: &BodyKinematics,
    jb_inertial: &Jacobian,
    wb: &Vector3<f64>,
) -> WingKinematics {
    let qd = &state.qd;
    let o = side.qd_offset();
    let [_, psi_m, psi_e, _] = state.theta(side).as_array();
    let (rate_p, rate_m, rate_e, rate_f) = (qd[o], qd[o + 1], qd[o + 2], qd[o + 3]);

    let rb = body.rotation;
    let (arm_rel, wing_rel) = wing_rotations(state.theta(side));
    let ra = rb * arm_rel;
    let rw = ra * wing_rel;

    // Inertial joint axes per unit joint rate.
    let axis_p = rb * rot_z(psi_m) * Vector3::x();
    let axis_m = rb * Vector3::z();
    let axis_e = ra * Vector3::x();
    let axis_f = ra * rot_x(psi_e) * Vector3::z();

    let wa = wb + axis_m * rate_m + axis_p * rate_p;
    let ww = wa + axis_e * rate_e + axis_f * rate_f;

    let mut ja = *jb_inertial;
    ja.set_column(o, &axis_p);
    ja.set_column(o + 1, &axis_m);
    let mut jw = ja;
    jw.set_column(o + 2, &axis_e);
    jw.set_column(o + 3, &axis_f);

    // Each joint axis is fixed in a frame spinning with everything upstream of it.
    let w_m = axis_m * rate_m;
    let alpha_a = wb.cross(&w_m) + (wb + w_m).cross(&(axis_p * rate_p));
    let w_e = axis_e * rate_e;
    let alpha_w = alpha_a + wa.cross(&w_e) + (wa + w_e).cross(&(axis_f * rate_f));

    let links = params.links(side);
    let r1 = rb * links[0];
    let r_arm = 0.5 * ra * links[1];
    let r_elbow = ra * links[1];
    let r_wing = rw * links[2];

    let shoulder = body.position + r1;
    let shoulder_jv = body.jv - skew(&r1) * jb_inertial;
    let shoulder_acc = wb.cross(&wb.cross(&r1));

    let lever = |r: &Vector3<f64>, w: &Vector3<f64>, alpha: &Vector3<f64>| alpha.cross(r) + w.cross(&w.cross(r));

    let arm_jv = shoulder_jv - skew(&r_arm) * ja;
    let arm = BodyKinematics {
        rotation: ra,
        position: shoulder + r_arm,
        velocity: arm_jv * qd,
        omega: ra.transpose() * wa,
        jv: arm_jv,
        jw: ra.transpose() * ja,
        accel_bias: shoulder_acc + lever(&r_arm, &wa, &alpha_a),
        alpha_bias: ra.transpose() * alpha_a,
    };

    let elbow_jv = shoulder_jv - skew(&r_elbow) * ja;
    let elbow = PointKinematics {
        position: shoulder + r_elbow,
        velocity: elbow_jv * qd,
        jv: elbow_jv,
        accel_bias: shoulder_acc + lever(&r_elbow, &wa, &alpha_a),
    };

    let wing_jv = elbow.jv - skew(&r_wing) * jw;
    let wing = BodyKinematics {
        rotation: rw,
        position: elbow.position + r_wing,
        velocity: wing_jv * qd,
        omega: rw.transpose() * ww,
        jv: wing_jv,
        jw: rw.transpose() * jw,
        accel_bias: elbow.accel_bias + lever(&r_wing, &ww, &alpha_w),
        alpha_bias: rw.transpose() * alpha_w,
    };

    WingKinematics {
        side,
        arm,
        wing,
        elbow,
        arm_relative: arm_rel,
        wing_relative: wing_rel,
        wing_omega_inertial: ww,
        wing_jw_inertial: jw,
    }
}
