//! Experiment driver for the bat-robot model: scenario files, the five
//! experiment commands, trace export and plot scripts.

pub mod commands;
pub mod config;
pub mod error;
pub mod export;
pub mod metrics;
pub mod plot;

pub use commands::{execute, run, Bundle, Command};
pub use config::{Scenario, ScenarioConfig};
pub use error::CliError;

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
struct BookCli;
