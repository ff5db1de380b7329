//! The `prunekit` command line.
//!
//! ```text
//! prunekit <preprocess|train|explain|sweep|intervals|synth> --config <path> [--output-dir <path>] [--verbose]
//! ```
//!
//! Logs go to stderr, artifacts to the output directory, and stdout carries a
//! single JSON summary line. `PRUNEKIT_THREADS` caps the worker threads.

mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

pub use commands::{
    cmd_explain, cmd_intervals, cmd_preprocess, cmd_sweep, cmd_synth, cmd_train, execute, CommandKind, Context, Summary,
};
pub use config::{InputSource, LoadedConfig, RunConfig};

use crate::error::{Error, Result};

pub const THREADS_ENV: &str = "PRUNEKIT_THREADS";

#[derive(Parser)]
#[command(
    name = "prunekit",
    version,
    about = "Explainability-driven feature pruning for tree ensembles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Run configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's output_dir.
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Turn a time-series directory into features.csv.
    Preprocess(RunArgs),
    /// Cross-validate and fit the configured model.
    Train(RunArgs),
    /// Rank features with each configured attribution method.
    Explain(RunArgs),
    /// Retrain on top-p% feature subsets for each method.
    Sweep(RunArgs),
    /// Cross-validate on truncated series.
    Intervals(RunArgs),
    /// Write the configured synthetic dataset.
    Synth(RunArgs),
}

impl Command {
    fn split(self) -> (CommandKind, RunArgs) {
        match self {
            Command::Preprocess(a) => (CommandKind::Preprocess, a),
            Command::Train(a) => (CommandKind::Train, a),
            Command::Explain(a) => (CommandKind::Explain, a),
            Command::Sweep(a) => (CommandKind::Sweep, a),
            Command::Intervals(a) => (CommandKind::Intervals, a),
            Command::Synth(a) => (CommandKind::Synth, a),
        }
    }
}

fn thread_limit() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(Error::Config(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))),
        },
        Err(_) => Ok(None),
    }
}

/// Loads the config and runs one command, honouring `PRUNEKIT_THREADS`.
pub fn run(kind: CommandKind, config_path: &Path, output_dir: Option<&Path>) -> Result<Summary> {
    let loaded = LoadedConfig::load(config_path)?;
    let ctx = Context::new(loaded, output_dir);
    match thread_limit()? {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(|| execute(kind, &ctx)),
        None => execute(kind, &ctx),
    }
}

/// Entry point for the binary.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = cli.command.split();
    let level = if args.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .target(env_logger::Target::Stderr)
        .init();
    match run(kind, &args.config, args.output_dir.as_deref()) {
        Ok(summary) => {
            println!("{}", serde_json::to_string(&summary).expect("summary serializes"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!(
                "{}",
                serde_json::json!({"status": "error", "command": kind.name(), "error": e.to_string()})
            );
            ExitCode::FAILURE
        }
    }
}
