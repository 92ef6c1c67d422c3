//! `cqed-fom`: configuration parsing, command dispatch and table output.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::fs;
use std::path::PathBuf;

use clap::Parser;

pub use commands::{run, Command};
pub use config::{parse_config, RunConfig};
pub use error::{CliError, CliResult};
pub use output::{Cell, Format, Table};

/// Cavity-QED figures of merit from a JSON configuration.
#[derive(Debug, Parser)]
#[command(name = "cqed-fom", version)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// JSON configuration; omitted means all defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
    /// Worker threads (default: one per core).
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

/// Parses the config, sizes the worker pool and runs the command.
pub fn execute(cli: &Cli) -> CliResult<Vec<PathBuf>> {
    let text = match &cli.config {
        Some(p) => fs::read_to_string(p).map_err(|e| CliError::io(p, e))?,
        None => "{}".to_string(),
    };
    let cfg = parse_config(&text)?;
    fs::create_dir_all(&cli.out).map_err(|e| CliError::io(&cli.out, e))?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::config("--threads", "must be >= 1"));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::config("--threads", e.to_string()))?;
    pool.install(|| run(cli.command, &cfg, &cli.out, cli.format))
}
