//! `diachron`: validate, annotate, score and report on fill-mask predictions.
//!
//! Exit status is 0 on success, 1 when an input is invalid or a command
//! fails on its data, and 2 for usage errors (reported by the argument
//! parser before any file is read).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use diachron_core::MissingSigmaPolicy;

pub mod commands;
mod inputs;

#[derive(Debug, Parser)]
#[command(name = "diachron", version)]
#[command(about = "Diachronic bias and domain adequacy of masked language models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check input files and report every problem with its location
    Validate(ValidateArgs),
    /// Interactively assign sigma scores to predicted tokens
    Annotate(AnnotateArgs),
    /// Change the sigma of an existing annotation, keeping the old value in its note
    Amend(AmendArgs),
    /// Compute bias and domain adequacy and write tables, summaries and plots
    Score(ScoreArgs),
    /// Re-render tables, summaries and plots from a scores file
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Test set (JSON document)
    #[arg(long, value_name = "PATH")]
    pub testset: Option<PathBuf>,
    /// Predictions file (JSONL); repeat for several files
    #[arg(long, value_name = "PATH", num_args = 1..)]
    pub predictions: Vec<PathBuf>,
    /// Annotation store (JSONL)
    #[arg(long, value_name = "PATH")]
    pub annotations: Option<PathBuf>,
    /// Scores file written by `score` (JSONL)
    #[arg(long, value_name = "PATH")]
    pub scores: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    /// Fail when a predicted token has no sigma, listing every such pair
    Strict,
    /// Score tokens without a sigma as neutral (0) and mark them
    NeutralFill,
}

impl From<PolicyArg> for MissingSigmaPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Strict => Self::Strict,
            PolicyArg::NeutralFill => Self::NeutralFill,
        }
    }
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Test set (JSON document)
    #[arg(long, value_name = "PATH")]
    pub testset: PathBuf,
    /// Predictions file (JSONL); repeat for several files
    #[arg(long, value_name = "PATH", num_args = 1.., required = true)]
    pub predictions: Vec<PathBuf>,
    /// Annotation store (JSONL)
    #[arg(long, value_name = "PATH")]
    pub annotations: PathBuf,
    /// Directory receiving all outputs; created if missing
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    /// Score only the n most probable predictions of each set
    #[arg(long, value_name = "N", default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    pub top_n: u64,
    /// What to do with predicted tokens that have no sigma
    #[arg(long, value_enum, default_value_t = PolicyArg::Strict)]
    pub missing_sigma: PolicyArg,
    /// Decimals shown in the text tables
    #[arg(long, value_name = "DIGITS", default_value_t = 3, value_parser = clap::value_parser!(u8).range(1..=12))]
    pub precision: u8,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Test set (JSON document)
    #[arg(long, value_name = "PATH")]
    pub testset: PathBuf,
    /// Scores file written by `score` (JSONL)
    #[arg(long, value_name = "PATH")]
    pub scores: PathBuf,
    /// Directory receiving all outputs; created if missing
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    /// Decimals shown in the text tables
    #[arg(long, value_name = "DIGITS", default_value_t = 3, value_parser = clap::value_parser!(u8).range(1..=12))]
    pub precision: u8,
}

#[derive(Debug, Args)]
pub struct AnnotateArgs {
    /// Test set (JSON document)
    #[arg(long, value_name = "PATH")]
    pub testset: PathBuf,
    /// Predictions file (JSONL); repeat for several files
    #[arg(long, value_name = "PATH", num_args = 1.., required = true)]
    pub predictions: Vec<PathBuf>,
    /// Annotation store (JSONL); created on the first answer if missing
    #[arg(long, value_name = "PATH")]
    pub store: PathBuf,
    /// Only queue the n most probable predictions of each set
    #[arg(long, value_name = "N", default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    pub top_n: u64,
    /// Name recorded on every new annotation
    #[arg(long, value_name = "NAME")]
    pub annotator: Option<String>,
    /// Show each candidate's model probability while annotating
    #[arg(long)]
    pub reveal_probabilities: bool,
}

#[derive(Debug, Args)]
pub struct AmendArgs {
    /// Annotation store (JSONL)
    #[arg(long, value_name = "PATH")]
    pub store: PathBuf,
    /// Sentence id of the annotation
    #[arg(long, value_name = "ID")]
    pub sentence: String,
    /// Token of the annotation, verbatim
    #[arg(long, value_name = "TOKEN")]
    pub token: String,
    /// New sigma: one of -1, -0.5, 0, 0.5, 1
    #[arg(long, value_name = "SIGMA", allow_negative_numbers = true)]
    pub sigma: String,
    /// Name recorded as the amending annotator
    #[arg(long, value_name = "NAME")]
    pub annotator: Option<String>,
}

/// Runs a parsed command line and maps the outcome to an exit status.
pub fn run(cli: Cli) -> ExitCode {
    let result = match cli.command {
        Command::Validate(args) => commands::validate::run(&args),
        Command::Annotate(args) => commands::annotate::run(&args),
        Command::Amend(args) => commands::amend::run(&args),
        Command::Score(args) => commands::score::run(&args),
        Command::Report(args) => commands::report::run(&args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
