//! Sweeps, threshold reports and the validation suite behind the `ecs-epp` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod grid;
pub mod table;
pub mod validate;

pub use error::{CliError, CliResult};
