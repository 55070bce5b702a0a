//! Command-line front end and HTTP service for the preposition sense
//! workbench.

pub mod args;
mod commands;
pub mod ops;
pub mod project;
pub mod service;

pub use commands::{run_command, CliError, EXIT_DATA, EXIT_OK, EXIT_USAGE};
pub use project::{ConfigError, DataDir, ProjectConfig};
