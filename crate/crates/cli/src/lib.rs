//! Command-line front end: configuration parsing and command dispatch.

pub mod config;
pub mod run;

pub use config::{parse_config, Command, ConfigError, RunConfig};
pub use run::{resolve_command, run, RunError, RunReport};
