use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::model::{skew, JointVector, QdVector, State};

/// Time derivative of a [`State`], plus the non-conservative power flowing
/// into the system at that instant.
#[derive(Debug, Clone, PartialEq)]
pub struct StateRate {
    pub rotation: Matrix3<f64>,
    pub position: Vector3<f64>,
    pub joints: JointVector,
    pub qdd: QdVector,
    pub power: f64,
}

impl StateRate {
    /// Configuration rates implied by `state.qd`, with the given
    /// quasi-acceleration.
    pub fn kinematic(state: &State, qdd: QdVector, power: f64) -> Self {
        Self {
            rotation: state.rotation * skew(&state.omega()),
            position: state.velocity(),
            joints: state.joint_rates(),
            qdd,
            power,
        }
    }

    fn is_finite(&self) -> bool {
        self.rotation
            .iter()
            .chain(self.position.iter())
            .chain(self.joints.iter())
            .chain(self.qdd.iter())
            .all(|v| v.is_finite())
            && self.power.is_finite()
    }
}

fn advance(state: &State, rate: &StateRate, h: f64) -> State {
    let mut next = state.clone();
    next.rotation += rate.rotation * h;
    next.position += rate.position * h;
    next.set_joints(&(state.joints() + rate.joints * h));
    next.qd += rate.qdd * h;
    next
}

/// One classical Runge–Kutta step. The rotation is advanced additively
/// through `Ṙ = R S(ω)` and projected back onto SO(3) once at the end.
///
/// Returns the new state and the non-conservative work done over the step.
pub fn rk4_step<F>(state: &State, t: f64, dt: f64, mut derivative: F) -> Result<(State, f64)>
where
    F: FnMut(f64, &State) -> Result<StateRate>,
{
    if !(dt > 0.0) {
        return Err(Error::InvalidConfig(format!("dt must be positive, got {dt}")));
    }
    let mut eval = |t: f64, s: &State| -> Result<StateRate> {
        let r = derivative(t, s)?;
        if r.is_finite() {
            Ok(r)
        } else {
            Err(Error::BlowUp { t })
        }
    };
    let half = 0.5 * dt;
    let k1 = eval(t, state)?;
    let k2 = eval(t + half, &advance(state, &k1, half))?;
    let k3 = eval(t + half, &advance(state, &k2, half))?;
    let k4 = eval(t + dt, &advance(state, &k3, dt))?;

    let w = dt / 6.0;
    let mut next = state.clone();
    next.rotation += (k1.rotation + (k2.rotation + k3.rotation) * 2.0 + k4.rotation) * w;
    next.position += (k1.position + (k2.position + k3.position) * 2.0 + k4.position) * w;
    next.set_joints(&(state.joints() + (k1.joints + (k2.joints + k3.joints) * 2.0 + k4.joints) * w));
    next.qd += (k1.qdd + (k2.qdd + k3.qdd) * 2.0 + k4.qdd) * w;
    let work = (k1.power + 2.0 * (k2.power + k3.power) + k4.power) * w;

    next.rotation = reorthonormalize(&next.rotation)?;
    if !next.is_finite() {
        return Err(Error::BlowUp { t: t + dt });
    }
    Ok((next, work))
}

/// Nearest rotation in the Frobenius sense (orthogonal polar factor), by
/// Newton's iteration `X ← (X + X⁻ᵀ)/2`.
pub fn reorthonormalize(r: &Matrix3<f64>) -> Result<Matrix3<f64>> {
    let det = r.determinant();
    if !det.is_finite() || det <= 0.0 {
        return Err(Error::CorruptRotation { det });
    }
    let mut x = *r;
    for _ in 0..30 {
        let inv_t = x.try_inverse().ok_or(Error::CorruptRotation { det: x.determinant() })?.transpose();
        let next = (x + inv_t) * 0.5;
        let change = (next - x).norm();
        x = next;
        if change < 1e-15 {
            break;
        }
    }
    let det = x.determinant();
    if !det.is_finite() || det <= 0.0 {
        return Err(Error::CorruptRotation { det });
    }
    Ok(x)
}
