//! Command-line front end and local HTTP service over the `coupled-logistic` engines.
//!
//! The `coupled-map` binary is a thin wrapper around [`cli::run`]. Every subcommand can be
//! driven by a TOML [`config::RunConfig`]; the checked-in configs under `configs/`
//! reproduce the standard figure set.

pub mod api;
pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod numbers;

pub use config::RunConfig;
pub use error::{LabError, LabResult};
