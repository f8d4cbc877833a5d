use std::process::ExitCode;

use anyhow::Result;
use diachron_core::ingest::parse_scores;

use super::outputs;
use crate::inputs::{load, load_testset};
use crate::ReportArgs;

pub fn run(args: &ReportArgs) -> Result<ExitCode> {
    let testset = load_testset(&args.testset)?;
    let records = load(&args.scores, parse_scores)?;
    for r in &records {
        if let Some(s) = testset.get(&r.sentence_id) {
            anyhow::ensure!(
                s.rho() == r.rho,
                "{}: record ({}, {}) has rho {} but the test set gives {}",
                args.scores.display(),
                r.model_id,
                r.sentence_id,
                r.rho,
                s.rho()
            );
        }
    }
    if records.is_empty() {
        eprintln!("warning: no score records");
    }
    outputs::render(&args.out, &records, &testset, args.precision.into())?;
    Ok(ExitCode::SUCCESS)
}
