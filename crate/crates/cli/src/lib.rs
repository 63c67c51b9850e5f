//! Command-line front end: cut-off profiles, thresholds, exact distances and
//! the verification harness, with CSV and JSON output.

pub mod app;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use app::{run, Cli};
pub use error::{CliError, CliResult};
