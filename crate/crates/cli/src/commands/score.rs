use std::process::ExitCode;

use anyhow::{Context, Result};
use diachron_core::ingest::{parse_annotations, write_scores};
use diachron_core::scoring::{score_all, MissingSigmaPolicy, ScoringError};

use super::outputs::{self, SCORES_FILE};
use crate::inputs::{load, load_prediction_sets, load_testset};
use crate::ScoreArgs;

pub fn run(args: &ScoreArgs) -> Result<ExitCode> {
    let testset = load_testset(&args.testset)?;
    let sets = load_prediction_sets(&args.predictions, args.top_n)?;
    let store = load(&args.annotations, parse_annotations)?;
    let policy = MissingSigmaPolicy::from(args.missing_sigma);

    let scored = match score_all(&testset, &sets, &store, policy) {
        Err(ScoringError::MissingAnnotation(pairs)) => {
            for p in &pairs {
                eprintln!("missing sigma: {p}");
            }
            anyhow::bail!(
                "{} predicted token(s) have no sigma; annotate them or pass --missing-sigma neutral-fill",
                pairs.len()
            );
        }
        other => other.context("scoring failed")?,
    };
    for p in &scored.imputed {
        eprintln!("warning: no sigma for {p}, scored as neutral");
    }
    if scored.records.is_empty() {
        eprintln!("warning: no prediction sets to score");
    }

    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create {}", args.out.display()))?;
    outputs::write(&args.out, SCORES_FILE, &write_scores(&scored.records))?;
    outputs::render(&args.out, &scored.records, &testset, args.precision.into())?;
    Ok(ExitCode::SUCCESS)
}
