use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical parameters of the five-body model, SI units throughout.
///
/// Link vectors are indexed `[shoulder offset, arm, wing]`: the first is
/// expressed in the body frame, the second in the arm frame and the third in
/// the wing frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub body_mass: f64,
    pub arm_mass: f64,
    pub wing_mass: f64,
    /// Principal moments, body frame.
    pub body_inertia: Vector3<f64>,
    pub arm_inertia: Vector3<f64>,
    pub wing_inertia: Vector3<f64>,
    pub left_links: [Vector3<f64>; 3],
    pub right_links: [Vector3<f64>; 3],
    pub chord: f64,
    pub span: f64,
    pub air_density: f64,
    /// Wingbeat frequency in Hz.
    pub flap_frequency: f64,
    pub gravity: f64,
}

impl ModelParams {
    /// The reference robot: 5 g body, 0.35 g arms, 5.6 g wings, 150 mm square
    /// wing plates flapping at 10 Hz.
    pub fn reference() -> Self {
        const GCM2: f64 = 1e-7;
        const MM: f64 = 1e-3;
        Self {
            body_mass: 5.0e-3,
            arm_mass: 0.35e-3,
            wing_mass: 5.6e-3,
            body_inertia: Vector3::new(0.625, 3.65, 3.65) * GCM2,
            arm_inertia: Vector3::new(0.147, 0.147, 0.040) * GCM2,
            wing_inertia: Vector3::new(1.05, 2.11, 2.11) * GCM2,
            left_links: [
                Vector3::new(0.0, 25.0, 25.0) * MM,
                Vector3::new(0.0, 0.0, 50.0) * MM,
                Vector3::new(0.0, 0.0, 150.0) * MM,
            ],
            right_links: [
                Vector3::new(0.0, -25.0, 25.0) * MM,
                Vector3::new(0.0, 0.0, 50.0) * MM,
                Vector3::new(0.0, 0.0, 150.0) * MM,
            ],
            chord: 150.0 * MM,
            span: 150.0 * MM,
            air_density: 1.0,
            flap_frequency: 10.0,
            gravity: 9.81,
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.body_mass + 2.0 * (self.arm_mass + self.wing_mass)
    }

    /// Flapping angular rate Ω = 2π f.
    pub fn flap_rate(&self) -> f64 {
        std::f64::consts::TAU * self.flap_frequency
    }

    /// Wingbeat period in seconds.
    pub fn wingbeat(&self) -> f64 {
        1.0 / self.flap_frequency
    }

    pub fn links(&self, side: crate::model::Side) -> &[Vector3<f64>; 3] {
        match side {
            crate::model::Side::Left => &self.left_links,
            crate::model::Side::Right => &self.right_links,
        }
    }

    pub fn validate(&self) -> Result<()> {
        fn positive(field: &'static str, v: f64) -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter { field, reason: format!("must be finite and > 0, got {v}") })
            }
        }
        positive("body_mass", self.body_mass)?;
        positive("arm_mass", self.arm_mass)?;
        positive("wing_mass", self.wing_mass)?;
        for (field, inertia) in [
            ("body_inertia", &self.body_inertia),
            ("arm_inertia", &self.arm_inertia),
            ("wing_inertia", &self.wing_inertia),
        ] {
            for &v in inertia.iter() {
                positive(field, v)?;
            }
        }
        positive("chord", self.chord)?;
        positive("span", self.span)?;
        positive("air_density", self.air_density)?;
        positive("flap_frequency", self.flap_frequency)?;
        if !(self.gravity.is_finite() && self.gravity >= 0.0) {
            return Err(Error::InvalidParameter {
                field: "gravity",
                reason: format!("must be finite and >= 0, got {}", self.gravity),
            });
        }
        for links in [&self.left_links, &self.right_links] {
            if links.iter().any(|l| l.iter().any(|v| !v.is_finite())) {
                return Err(Error::InvalidParameter { field: "links", reason: "non-finite link vector".into() });
            }
        }
        Ok(())
    }
}

impl Default for ModelParams {
    fn default() -> Self {
        Self::reference()
    }
}
