//! Batch driver for the `symdyn` library: loads an experiment config,
//! runs one pipeline and writes its tables, certificates and a run
//! manifest with content digests.

pub mod commands;
pub mod config;
pub mod manifest;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

pub use commands::Context;
pub use config::ExperimentConfig;

/// Failures, each tied to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("bound violated: {0}")]
    Bound(String),
    #[error("inconsistent verdicts: {0}")]
    Inconsistent(String),
    #[error("scan failure: {0}")]
    Scan(String),
    #[error("artifact error: {0}")]
    Artifact(String),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Bound(_) => 3,
            CliError::Inconsistent(_) => 4,
            CliError::Scan(_) => 5,
            CliError::Artifact(_) | CliError::Other(_) => 1,
        }
    }
}

impl From<symdyn::Error> for CliError {
    fn from(e: symdyn::Error) -> Self {
        use symdyn::Error as E;
        let msg = e.to_string();
        match e {
            E::Violation { .. } | E::BoundViolated { .. } => CliError::Bound(msg),
            E::InconsistentVerdicts(_) => CliError::Inconsistent(msg),
            E::Manifest(_) => CliError::Artifact(msg),
            E::ParseSft(_)
            | E::EmptyAlphabet
            | E::AlphabetTooLarge(_)
            | E::RaggedMatrix { .. }
            | E::EmptyRowOrColumn(_)
            | E::NotMixing { .. }
            | E::ParseWord(_)
            | E::BadSymbol(_)
            | E::Inadmissible(_)
            | E::NotCyclicallyAdmissible(_)
            | E::EmptyWord
            | E::ZeroDepth
            | E::BadShrink
            | E::EmptyNet
            | E::NoTargets
            | E::CoverageFailure { .. }
            | E::InfeasibleEpsilon { .. }
            | E::ScheduleInfeasible { .. }
            | E::CocycleSize { .. }
            | E::GapTooSmall { .. } => CliError::Config(msg),
            _ => CliError::Other(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Other(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "symdyn", version, about = "Universal points and hyperbolicity certificates on subshifts of finite type")]
pub struct Cli {
    /// Experiment config (TOML).
    #[arg(short, long, global = true, default_value = "symdyn.toml")]
    pub config: PathBuf,
    /// Output directory, overriding `output_dir` from the config.
    #[arg(short, long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the glued point and persist its schedule.
    Build,
    /// Check averaging bounds along a built point and write the density tables.
    Theorem1 {
        /// Use this schedule instead of building one.
        #[arg(long)]
        schedule: Option<PathBuf>,
        /// Check this point file against the schedule.
        #[arg(long)]
        point: Option<PathBuf>,
    },
    /// Run the hyperbolicity pipeline for every configured cocycle.
    Theorem2 {
        /// Flip the point verdict before the consistency checks.
        #[arg(long)]
        inject_fault: bool,
    },
    /// Scan every cylinder of length `scan_depth` for density witnesses.
    Scan,
    /// Re-check the artifacts in the output directory.
    Verify,
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let ctx = Context::load(&cli.config, cli.out.as_deref())?;
    match &cli.command {
        Command::Build => commands::build(&ctx),
        Command::Theorem1 { schedule, point } => commands::theorem1(&ctx, schedule.as_deref(), point.as_deref()),
        Command::Theorem2 { inject_fault } => commands::theorem2(&ctx, *inject_fault),
        Command::Scan => commands::scan(&ctx),
        Command::Verify => commands::verify(&ctx),
    }
}
