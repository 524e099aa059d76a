//! Dynamics, aerodynamics and gait optimization for a five-body flapping-wing
//! bat robot.
//!
//! The model is a body with two articulated armwings (arm + wing plate per
//! side, four joints per wing). Body attitude lives on SO(3) with a body-frame
//! angular velocity as quasi-velocity, so the state never passes through
//! Euler angles.

pub mod aero;
pub mod dynamics;
pub mod error;
pub mod gait;
pub mod model;
pub mod opt;
pub mod quadrature;
pub mod sim;
pub mod units;

#[doc(hidden)]
pub mod testkit;

pub use error::{Error, Result};
pub use model::{JointAngles, ModelParams, Side, State};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    struct Readme;
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/model.md")]
    struct Model;
    #[doc = include_str!("../../../book/src/aerodynamics.md")]
    struct Aerodynamics;
    #[doc = include_str!("../../../book/src/dynamics.md")]
    struct Dynamics;
    #[doc = include_str!("../../../book/src/gaits.md")]
    struct Gaits;
    #[doc = include_str!("../../../book/src/simulation.md")]
    struct Simulation;
    #[doc = include_str!("../../../book/src/optimization.md")]
    struct Optimization;
}
