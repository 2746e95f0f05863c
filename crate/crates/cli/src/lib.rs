//! Config ingestion, experiment orchestration and reporting for the `wpi`
//! command-line tool.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod telemetry;

pub use error::{CliError, Result};
