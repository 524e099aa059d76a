//! Unit conversion for parameter ingestion.
//!
//! Everything inside the crate is SI (kg, m, s, rad). Config files may carry
//! the units the robot's datasheet uses (g, mm, g·cm², deg, Hz); each quantity
//! kind has a small table of accepted spellings and their SI factors.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Mass,
    Length,
    Inertia,
    Density,
    Frequency,
    Angle,
    Time,
    Velocity,
    Acceleration,
}

impl Quantity {
    fn name(self) -> &'static str {
        match self {
            Quantity::Mass => "mass",
            Quantity::Length => "length",
            Quantity::Inertia => "inertia",
            Quantity::Density => "density",
            Quantity::Frequency => "frequency",
            Quantity::Angle => "angle",
            Quantity::Time => "time",
            Quantity::Velocity => "velocity",
            Quantity::Acceleration => "acceleration",
        }
    }

    fn table(self) -> &'static [(&'static str, f64)] {
        match self {
            Quantity::Mass => &[("kg", 1.0), ("g", 1e-3)],
            Quantity::Length => &[("m", 1.0), ("cm", 1e-2), ("mm", 1e-3)],
            Quantity::Inertia => {
                &[("kg*m^2", 1.0), ("kg.m^2", 1.0), ("g*cm^2", 1e-7), ("g.cm^2", 1e-7), ("g*mm^2", 1e-9)]
            }
            Quantity::Density => &[("kg/m^3", 1.0), ("g/cm^3", 1e3)],
            // Frequencies are kept in Hz; the gait converts to rad/s.
            Quantity::Frequency => &[("Hz", 1.0), ("rad/s", 1.0 / std::f64::consts::TAU)],
            Quantity::Angle => &[("rad", 1.0), ("deg", std::f64::consts::PI / 180.0)],
            Quantity::Time => &[("s", 1.0), ("ms", 1e-3)],
            Quantity::Velocity => &[("m/s", 1.0), ("mm/s", 1e-3)],
            Quantity::Acceleration => &[("m/s^2", 1.0)],
        }
    }

    /// Multiplicative factor taking a value in `unit` to SI.
    pub fn factor(self, unit: &str) -> Result<f64> {
        let unit = unit.trim();
        self.table()
            .iter()
            .find(|(name, _)| *name == unit)
            .map(|&(_, f)| f)
            .ok_or_else(|| Error::UnknownUnit { quantity: self.name(), unit: unit.to_owned() })
    }

    pub fn to_si(self, value: f64, unit: &str) -> Result<f64> {
        Ok(value * self.factor(unit)?)
    }

    pub fn from_si(self, value: f64, unit: &str) -> Result<f64> {
        Ok(value / self.factor(unit)?)
    }
}
