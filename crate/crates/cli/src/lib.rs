//! Command-line front end: experiment files in, JSON reports out.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

pub use commands::{execute, run, Command, RunOptions};
pub use config::ExperimentConfig;
pub use error::{CliError, ErrorReport};
pub use report::{Body, Report, SCHEMA_VERSION};
