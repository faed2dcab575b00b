//! File formats, experiment runner and report rendering around
//! `fairdiff-core`.

pub mod error;
pub mod experiment;
pub mod files;
pub mod model_io;
pub mod render;
pub mod schema;

pub use error::{CliError, Result};
pub use experiment::{load_experiment, run_experiment, ExperimentConfig, ExperimentOutcome};
