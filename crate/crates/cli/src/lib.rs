//! Config-driven experiments on top of `tact_core`: observable sweeps,
//! scaling with `N`, phase-space snapshots at labelled events, the mean-field
//! portrait and the closed-form approximations. Every run writes a
//! `manifest.json` with the configuration, timings and file checksums.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{run, Command};
pub use config::{ConfigError, ExperimentConfig, OutputFormat, Overrides};
pub use error::CliError;
pub use output::{RunManifest, Table};
