//! Experiment runners for local surrogation of quantum models: JSON configs
//! in, tidy CSV/JSON tables out.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod seeds;

use std::path::Path;

pub use config::{ExperimentConfig, ExperimentId};
pub use error::HarnessError;
pub use output::RunOutput;

/// Runs the configured experiment and writes all outputs into `out_dir`.
pub fn run_to_dir(config: &ExperimentConfig, out_dir: &Path) -> Result<RunOutput, HarnessError> {
    let run = experiments::run(config)?;
    output::write_all(out_dir, config, &run)?;
    Ok(run)
}
