//! Command-line front end: config parsing, presets and file output.

pub mod commands;
pub mod config;
pub mod output;
pub mod presets;

pub use commands::{cmd_optimize, cmd_run, CliError, RunSummary};
pub use config::{ConfigError, ConfigFile};
