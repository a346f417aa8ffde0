//! Configuration-driven experiment runner for `vqspde`.

pub mod config;
pub mod error;
pub mod run;

pub use config::{Experiment, ExperimentConfig, RawConfig};
pub use error::CliError;
pub use run::{encode_report, orbit_report, run_experiment, RunSummary};
