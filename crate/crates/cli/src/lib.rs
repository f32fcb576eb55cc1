//! Command-line front end: TOML experiment configs and the `typexp`
//! subcommands.

pub mod commands;
pub mod config;
pub mod error;

pub use commands::{run, threads_from_env, Cli, Command, Common, THREADS_ENV};
pub use config::{Epsilons, ExperimentConfig};
pub use error::{CliError, CliResult};
