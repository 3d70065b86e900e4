//! The `notestd` command line: one subcommand per pipeline stage.

pub mod artifacts;
pub mod commands;
pub mod config;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

pub use config::{BackendKind, Overrides, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {reason}")]
    Input { path: PathBuf, reason: String },
    #[error(transparent)]
    Runtime(#[from] anyhow::Error),
}

impl CliError {
    pub fn input(path: &std::path::Path, reason: impl std::fmt::Display) -> Self {
        CliError::Input { path: path.to_path_buf(), reason: reason.to_string() }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Input { .. } => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

/// How a stage ended when it did not error out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// Some notes failed; the rest were written.
    Partial { failed: usize },
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Partial { .. } => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "notestd", version, about = "Standardize clinical notes and mine them for structured data")]
pub struct Cli {
    #[command(flatten)]
    pub overrides: Overrides,
    /// Log at info level (RUST_LOG takes precedence)
    #[arg(short, long, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a CSV export and keep notes that pass the filters
    Ingest(commands::IngestArgs),
    /// Turn source notes into the sectioned standard form
    Standardize(commands::StandardizeArgs),
    /// Per-note counts, corpus summary and histograms
    Metrics(commands::MetricsArgs),
    /// Medications from PLAN, findings from HISTORY/EXAMINATION/IMPRESSION
    Extract(commands::ExtractArgs),
    /// Map mentions to codes and write a FHIR-shaped bundle
    ExportFhir(commands::ExportArgs),
    /// Content-loss check and quality ratings
    Evaluate(commands::EvaluateArgs),
    /// Projected cost and time for a model-backed run
    Estimate(commands::EstimateArgs),
    /// Synthetic corpora with a ledger of planted errors
    #[command(subcommand)]
    Fixtures(commands::FixturesCommand),
}

pub fn run(cli: &Cli) -> Result<Status, CliError> {
    let cfg = RunConfig::load(&cli.overrides)?;
    tracing::debug!(config_hash = %cfg.hash(), "configuration loaded");
    match &cli.command {
        Command::Ingest(a) => commands::ingest(&cfg, a),
        Command::Standardize(a) => commands::standardize(&cfg, a),
        Command::Metrics(a) => commands::metrics(&cfg, a),
        Command::Extract(a) => commands::extract(&cfg, a),
        Command::ExportFhir(a) => commands::export_fhir(&cfg, a),
        Command::Evaluate(a) => commands::evaluate(&cfg, a),
        Command::Estimate(a) => commands::estimate(&cfg, a),
        Command::Fixtures(commands::FixturesCommand::Generate(a)) => commands::fixtures_generate(&cfg, a),
    }
}

pub fn init_logging(verbose: bool) {
    use tracing_subscriber::EnvFilter;
    let default = if verbose { "info" } else { "warn" };
    let filter = EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new(default));
    let _ = tracing_subscriber::fmt().with_env_filter(filter).with_writer(std::io::stderr).try_init();
}
