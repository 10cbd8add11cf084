//! Command-line driver for the `gibbswave-core` experiments: configuration,
//! parallel ensembles, CSV series and run manifests.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod runner;

use std::path::Path;

pub use commands::Command;
pub use config::Config;
pub use error::CliError;
pub use runner::ParallelRunner;

use commands::Context;
use output::{Manifest, OutputDir};

/// Runs one subcommand end to end and writes its manifest.
///
/// The manifest is written whenever the output directory is usable, also for
/// numerical aborts and inconclusive statistics; its `status` field tells
/// them apart.
pub fn execute(
    command: Command,
    config: &Config,
    seed: u64,
    out: &Path,
    workers: usize,
) -> Result<(), CliError> {
    let runner = ParallelRunner::new(workers)
        .map_err(|e| CliError::Config(format!("cannot start {workers} workers: {e}")))?;
    let mut dir = OutputDir::create(out)?;
    let mut manifest = Manifest::new(command.name(), config, seed, workers);
    let ctx = Context {
        config,
        seed,
        runner: &runner,
    };
    let result = commands::run(command, &ctx, &mut dir, &mut manifest);
    let status = match &result {
        Ok(()) => "ok",
        Err(CliError::Inconclusive(_)) => "inconclusive",
        Err(CliError::Numerical(_)) => "numerical_abort",
        Err(_) => "failed",
    };
    manifest.write(&dir, status, result.as_ref().err())?;
    result
}
