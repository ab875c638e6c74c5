//! Library behind the `lipwalk` binary: scenario loading, the subcommands,
//! CSV output and SVG figures.

pub mod commands;
pub mod config;
pub mod error;
pub mod figures;
pub mod output;

pub use config::{Scenario, ScenarioConfig};
pub use error::{CliError, Result};
