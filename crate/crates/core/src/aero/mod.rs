//! Quasi-steady blade-element aerodynamics of the two wing plates.
//!
//! Each wing is a flat plate hinged at the elbow. Lift and drag act on the
//! quarter-chord line; the spanwise strip loads are integrated into a force
//! and a torque about the elbow, both in the wing frame, and then mapped onto
//! the quasi-velocities by virtual work.

use std::borrow::Cow;
use std::sync::OnceLock;

use nalgebra::{SMatrix, Vector3};
use serde::{Deserialize, Serialize};

use crate::model::{Kinematics, ModelParams, QdVector, Side, WingKinematics, NQD};
use crate::quadrature::gauss_legendre;

/// Below this relative airspeed a strip carries no load.
pub const DEGENERATE_FLOW: f64 = 1e-9;

/// Gauss–Legendre points per spanwise piece.
pub const DEFAULT_NODES: usize = 8;

/// Chordwise position of the load line, as a fraction of the chord.
pub const QUARTER_CHORD: f64 = 0.25;

/// Lift coefficient of the flapping plate; `alpha` in degrees.
pub fn lift_coefficient(alpha: f64) -> f64 {
    0.225 + 1.58 * (2.13 * alpha - 7.2).to_radians().sin()
}

/// Drag coefficient of the flapping plate; `alpha` in degrees.
pub fn drag_coefficient(alpha: f64) -> f64 {
    1.92 - 1.55 * (2.04 * alpha - 9.82).to_radians().cos()
}

/// Uniform ambient air velocity in the inertial frame.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct WindField {
    pub velocity: Vector3<f64>,
}

impl WindField {
    pub fn calm() -> Self {
        Self::default()
    }

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { velocity: Vector3::new(x, y, z) }
    }
}

/// Chordwise, normal and spanwise unit vectors of a wing, in its own frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WingFrameBasis {
    pub chordwise: Vector3<f64>,
    pub normal: Vector3<f64>,
    pub spanwise: Vector3<f64>,
}

impl WingFrameBasis {
    /// Left: `{e1, −e2, e3}`; the right wing is its mirror image, `{e1, e2, e3}`.
    pub fn for_side(side: Side) -> Self {
        let normal = match side {
            Side::Left => -Vector3::y(),
            Side::Right => Vector3::y(),
        };
        Self { chordwise: Vector3::x(), normal, spanwise: Vector3::z() }
    }

    /// Offset from the elbow to the load line at span fraction `r_hat`.
    pub fn load_point(&self, r_hat: f64, params: &ModelParams) -> Vector3<f64> {
        self.spanwise * (r_hat * params.span) + self.chordwise * (QUARTER_CHORD * params.chord)
    }
}

/// Aerodynamic force and torque about the elbow, wing frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AeroWrench {
    pub side: Side,
    pub force: Vector3<f64>,
    pub torque: Vector3<f64>,
}

/// One quadrature sample of the spanwise load.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripLoad {
    pub r_hat: f64,
    pub weight: f64,
    /// Offset of the load point from the elbow, wing frame.
    pub offset: Vector3<f64>,
    /// Load per unit span fraction, wing frame.
    pub force: Vector3<f64>,
}

/// Velocity of the wing point at span fraction `r_hat` relative to the air,
/// expressed in the wing frame.
pub fn airfoil_velocity(wing: &WingKinematics, wind: &WindField, params: &ModelParams, r_hat: f64) -> Vector3<f64> {
    let offset = WingFrameBasis::for_side(wing.side).load_point(r_hat, params);
    wing.wing.rotation.transpose() * (wing.point_velocity(&offset) - wind.velocity)
}

/// Angle of attack in degrees; 0 for degenerate flow.
pub fn angle_of_attack(v_w: &Vector3<f64>, basis: &WingFrameBasis) -> f64 {
    if v_w.norm() < DEGENERATE_FLOW {
        return 0.0;
    }
    basis.normal.dot(v_w).atan2(basis.chordwise.dot(v_w)).to_degrees()
}

/// Strip load per unit span fraction for a local relative velocity `v_w`.
pub fn strip_force(v_w: &Vector3<f64>, basis: &WingFrameBasis, params: &ModelParams) -> Vector3<f64> {
    let speed2 = v_w.norm_squared();
    if speed2.sqrt() < DEGENERATE_FLOW {
        return Vector3::zeros();
    }
    let alpha = angle_of_attack(v_w, basis);
    let q = 0.5 * params.air_density * params.chord * params.span * speed2;
    let lift = q * lift_coefficient(alpha);
    let drag = q * drag_coefficient(alpha) * signum0(basis.chordwise.dot(v_w));
    basis.normal * lift - basis.chordwise * drag
}

fn signum0(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn span_integrand<'a>(
    wing: &WingKinematics,
    wind: &WindField,
    params: &'a ModelParams,
    nodes: usize,
) -> (SpanIntegrand<'a>, Vec<f64>) {
    let basis = WingFrameBasis::for_side(wing.side);
    let v0 = airfoil_velocity(wing, wind, params, 0.0);
    let v1 = airfoil_velocity(wing, wind, params, 1.0);
    let dv = v1 - v0;

    // Discontinuities: drag sign flips where the chordwise component crosses
    // zero, and atan2 wraps where the normal component does.
    let mut cuts = vec![0.0, 1.0];
    for e in [basis.chordwise, basis.normal] {
        let (c0, c1) = (e.dot(&v0), e.dot(&v1));
        if c0 * c1 < 0.0 {
            cuts.push(c0 / (c0 - c1));
        }
    }
    if dv.norm_squared() > 0.0 {
        cuts.push(-v0.dot(&dv) / dv.norm_squared());
    }
    cuts.retain(|r| (0.0..=1.0).contains(r));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    let scale = 0.5 * params.air_density * params.chord * params.span * v0.norm_squared().max(v1.norm_squared());
    let ctx = SpanIntegrand { basis, v0, dv, params, rule: rule_for(nodes), tol: ADAPTIVE_TOLERANCE * scale };
    (ctx, cuts)
}

/// Quadrature samples of the load along the span.
///
/// The relative velocity is affine in `r_hat`, so the drag sign and the
/// ±180° wrap of the angle of attack can only switch where its chordwise or
/// normal component crosses zero, and the angle of attack turns fastest where
/// the airspeed is smallest. The span is split at both points, then each piece is
/// bisected until a `nodes`-point Gauss–Legendre rule agrees with the same
/// rule on its two halves.
pub fn wing_loads(wing: &WingKinematics, wind: &WindField, params: &ModelParams, nodes: usize) -> Vec<StripLoad> {
    let (ctx, cuts) = span_integrand(wing, wind, params, nodes);
    let mut loads = Vec::with_capacity(2 * nodes * cuts.len());
    for pair in cuts.windows(2) {
        let whole = ctx.sample(pair[0], pair[1], None);
        ctx.refine(pair[0], pair[1], whole, 0, Some(&mut loads));
    }
    loads
}

/// Absolute tolerance of the adaptive split, relative to the peak strip load.
const ADAPTIVE_TOLERANCE: f64 = 1e-10;
const MAX_DEPTH: u32 = 12;

type Wrench = (Vector3<f64>, Vector3<f64>);

fn rule_for(nodes: usize) -> Cow<'static, [(f64, f64)]> {
    static DEFAULT_RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    if nodes == DEFAULT_NODES {
        Cow::Borrowed(DEFAULT_RULE.get_or_init(|| gauss_legendre(DEFAULT_NODES)))
    } else {
        Cow::Owned(gauss_legendre(nodes))
    }
}

struct SpanIntegrand<'a> {
    basis: WingFrameBasis,
    v0: Vector3<f64>,
    dv: Vector3<f64>,
    params: &'a ModelParams,
    rule: Cow<'static, [(f64, f64)]>,
    tol: f64,
}

impl SpanIntegrand<'_> {
    fn sample(&self, a: f64, b: f64, mut out: Option<&mut Vec<StripLoad>>) -> Wrench {
        let (mut f, mut t) = (Vector3::zeros(), Vector3::zeros());
        for &(x, w) in self.rule.iter() {
            let r_hat = a + (b - a) * x;
            let load = StripLoad {
                r_hat,
                weight: (b - a) * w,
                offset: self.basis.load_point(r_hat, self.params),
                force: strip_force(&(self.v0 + self.dv * r_hat), &self.basis, self.params),
            };
            f += load.force * load.weight;
            t += load.offset.cross(&load.force) * load.weight;
            if let Some(o) = out.as_deref_mut() {
                o.push(load);
            }
        }
        (f, t)
    }

    /// Integral over `[a, b]` given the single-rule estimate `whole`.
    fn refine(&self, a: f64, b: f64, whole: Wrench, depth: u32, mut out: Option<&mut Vec<StripLoad>>) -> Wrench {
        let mid = 0.5 * (a + b);
        let mark = out.as_ref().map(|o| o.len());
        let left = self.sample(a, mid, out.as_deref_mut());
        let right = self.sample(mid, b, out.as_deref_mut());
        let df = (left.0 + right.0 - whole.0).norm();
        let dt = (left.1 + right.1 - whole.1).norm() / self.params.span;
        if depth >= MAX_DEPTH || df.max(dt) <= self.tol * (b - a) {
            return (left.0 + right.0, left.1 + right.1);
        }
        if let (Some(o), Some(m)) = (out.as_deref_mut(), mark) {
            o.truncate(m);
        }
        let l = self.refine(a, mid, left, depth + 1, out.as_deref_mut());
        let r = self.refine(mid, b, right, depth + 1, out);
        (l.0 + r.0, l.1 + r.1)
    }
}

/// Integrated wrench about the elbow of the `side` wing.
pub fn wing_wrench(kin: &Kinematics, wind: &WindField, params: &ModelParams, side: Side) -> AeroWrench {
    wing_wrench_with(kin, wind, params, side, DEFAULT_NODES)
}

pub fn wing_wrench_with(
    kin: &Kinematics,
    wind: &WindField,
    params: &ModelParams,
    side: Side,
    nodes: usize,
) -> AeroWrench {
    let (ctx, cuts) = span_integrand(kin.wing(side), wind, params, nodes);
    let (mut force, mut torque) = (Vector3::zeros(), Vector3::zeros());
    for pair in cuts.windows(2) {
        let whole = ctx.sample(pair[0], pair[1], None);
        let (f, t) = ctx.refine(pair[0], pair[1], whole, 0, None);
        force += f;
        torque += t;
    }
    AeroWrench { side, force, torque }
}

/// The 14×12 map from `u_a = [f_L; τ_L; f_R; τ_R]` to generalized forces.
///
/// Force columns are the elbow Jacobians rotated into the wing frame; torque
/// columns are the wing's body-frame angular Jacobians.
pub fn input_map(kin: &Kinematics) -> SMatrix<f64, NQD, 12> {
    let mut b = SMatrix::<f64, NQD, 12>::zeros();
    for (k, side) in Side::BOTH.into_iter().enumerate() {
        let w = kin.wing(side);
        let jf = (w.wing.rotation.transpose() * w.elbow.jv).transpose();
        b.fixed_view_mut::<NQD, 3>(0, 6 * k).copy_from(&jf);
        b.fixed_view_mut::<NQD, 3>(0, 6 * k + 3).copy_from(&w.wing.jw.transpose());
    }
    b
}

/// Generalized aerodynamic force `B_a u_a`.
pub fn generalized_aero_forces(kin: &Kinematics, wrenches: &[AeroWrench; 2]) -> QdVector {
    let mut q = QdVector::zeros();
    for wr in wrenches {
        let w = kin.wing(wr.side);
        q += w.elbow.jv.transpose() * (w.wing.rotation * wr.force);
        q += w.wing.jw.transpose() * wr.torque;
    }
    q
}

/// Both wrenches and their generalized force for the current kinematics.
pub fn aero_forces(kin: &Kinematics, wind: &WindField, params: &ModelParams) -> (QdVector, [AeroWrench; 2]) {
    let wrenches = [wing_wrench(kin, wind, params, Side::Left), wing_wrench(kin, wind, params, Side::Right)];
    (generalized_aero_forces(kin, &wrenches), wrenches)
}
