use std::path::Path;
use std::process::ExitCode;

use anyhow::{Context, Result};
use diachron_core::ingest::{
    parse_annotations, parse_predictions, parse_scores, parse_test_set, Diagnostics, Parsed,
    TestSetFile,
};

use crate::inputs::{print_diagnostics, print_warnings};
use crate::ValidateArgs;

/// Error and warning totals over every file checked.
#[derive(Default)]
struct Tally {
    errors: usize,
    warnings: usize,
}

impl Tally {
    fn check<T>(
        &mut self,
        path: &Path,
        parse: impl FnOnce(&[u8]) -> Result<Parsed<T>, Diagnostics>,
    ) -> Result<Option<T>> {
        let bytes =
            std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
        match parse(&bytes) {
            Ok(parsed) => {
                print_warnings(path, &parsed);
                self.warnings += parsed.warnings.len();
                println!("{}: ok", path.display());
                Ok(Some(parsed.value))
            }
            Err(d) => {
                print_diagnostics(path, &d);
                self.errors += d.len();
                println!("{}: {} error{}", path.display(), d.len(), plural(d.len()));
                Ok(None)
            }
        }
    }

    /// A cross-file problem: the record parsed but disagrees with the test set.
    fn cross(&mut self, path: &Path, code: &str, message: String) {
        eprintln!("{}: {code}: {message}", path.display());
        self.errors += 1;
    }
}

fn plural(n: usize) -> &'static str {
    if n == 1 {
        ""
    } else {
        "s"
    }
}

pub fn run(args: &ValidateArgs) -> Result<ExitCode> {
    anyhow::ensure!(
        args.testset.is_some()
            || !args.predictions.is_empty()
            || args.annotations.is_some()
            || args.scores.is_some(),
        "nothing to validate: pass at least one of --testset, --predictions, --annotations, --scores"
    );
    let mut tally = Tally::default();
    let testset: Option<TestSetFile> = match &args.testset {
        Some(path) => tally.check(path, parse_test_set)?,
        None => None,
    };

    for path in &args.predictions {
        let Some(file) = tally.check(path, parse_predictions)? else {
            continue;
        };
        if let Some(ts) = &testset {
            for set in file.sets() {
                if ts.get(set.sentence_id()).is_none() {
                    tally.cross(
                        path,
                        "UnknownSentence",
                        format!(
                            "model {:?} predicts for sentence {:?}, which is not in the test set",
                            set.model_id(),
                            set.sentence_id()
                        ),
                    );
                }
            }
        }
    }

    if let Some(path) = &args.annotations {
        if let (Some(store), Some(ts)) = (tally.check(path, parse_annotations)?, &testset) {
            for a in store.iter() {
                if ts.get(&a.sentence_id).is_none() {
                    tally.cross(
                        path,
                        "UnknownSentence",
                        format!(
                            "annotation ({}, {:?}) names a sentence not in the test set",
                            a.sentence_id, a.token
                        ),
                    );
                }
            }
        }
    }

    if let Some(path) = &args.scores {
        if let (Some(records), Some(ts)) = (tally.check(path, parse_scores)?, &testset) {
            for r in &records {
                match ts.get(&r.sentence_id) {
                    None => tally.cross(
                        path,
                        "UnknownSentence",
                        format!(
                            "record ({}, {}) names a sentence not in the test set",
                            r.model_id, r.sentence_id
                        ),
                    ),
                    Some(s) if s.rho() != r.rho => tally.cross(
                        path,
                        "InconsistentScore",
                        format!(
                            "record ({}, {}) has rho {} but the test set gives {}",
                            r.model_id,
                            r.sentence_id,
                            r.rho,
                            s.rho()
                        ),
                    ),
                    Some(_) => {}
                }
            }
        }
    }

    let mut line = format!("{} error{}", tally.errors, plural(tally.errors));
    if tally.warnings > 0 {
        line.push_str(&format!(
            ", {} warning{}",
            tally.warnings,
            plural(tally.warnings)
        ));
    }
    println!("{line}");
    Ok(if tally.errors == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}
