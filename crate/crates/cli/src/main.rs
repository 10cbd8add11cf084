use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use gibbswave::runner::default_workers;
use gibbswave::{execute, CliError, Command, Config};

/// Gibbs-measure experiments for the truncated radial wave equation on the
/// unit ball.
#[derive(Debug, Parser)]
#[command(name = "gibbswave", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Flat TOML key-value file, or a previous run's manifest.json.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: u64,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Worker threads; overrides the config key.
    #[arg(long)]
    workers: Option<usize>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gibbswave: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(args: &Args) -> Result<(), CliError> {
    let config = Config::load(&args.config)?;
    let workers = args
        .workers
        .or(config.workers)
        .unwrap_or_else(default_workers);
    if workers == 0 {
        return Err(CliError::Config("workers must be positive".into()));
    }
    println!(
        "{}: alpha = {}, p = {}, sigma = 3/2 - 4/p = {}, N = {}, seed = {}, workers = {workers}",
        args.command.name(),
        config.alpha,
        config.p,
        config.sigma(),
        config.n_modes,
        args.seed,
    );
    execute(args.command, &config, args.seed, &args.out, workers)?;
    println!(
        "wrote {}",
        args.out.join(gibbswave::output::MANIFEST_NAME).display()
    );
    Ok(())
}
