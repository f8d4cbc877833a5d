use std::path::Path;

use anyhow::{bail, Context, Result};
use diachron_core::ingest::{
    parse_predictions, parse_test_set, Diagnostics, Parsed, PredictionsFile, TestSetFile,
};
use diachron_core::PredictionSet;

/// Prints one diagnostic per line, prefixed with the file it came from.
pub fn print_diagnostics(path: &Path, diagnostics: &Diagnostics) {
    for e in diagnostics.errors() {
        eprintln!(
            "{}: {}: {}: {}",
            path.display(),
            e.locator,
            e.kind.code(),
            e.kind
        );
    }
}

pub fn print_warnings<T>(path: &Path, parsed: &Parsed<T>) {
    for w in &parsed.warnings {
        eprintln!("{}: warning: {w}", path.display());
    }
}

/// Reads and parses one file, reporting warnings and diagnostics on stderr.
pub fn load<T>(
    path: &Path,
    parse: impl FnOnce(&[u8]) -> Result<Parsed<T>, Diagnostics>,
) -> Result<T> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    match parse(&bytes) {
        Ok(parsed) => {
            print_warnings(path, &parsed);
            Ok(parsed.value)
        }
        Err(d) => {
            print_diagnostics(path, &d);
            let n = d.len();
            bail!(
                "{}: {n} error{}",
                path.display(),
                if n == 1 { "" } else { "s" }
            )
        }
    }
}

pub fn load_testset(path: &Path) -> Result<TestSetFile> {
    load(path, parse_test_set)
}

/// All prediction sets of all files, truncated to `top_n` rows each.
pub fn load_prediction_sets(paths: &[impl AsRef<Path>], top_n: u64) -> Result<Vec<PredictionSet>> {
    let mut sets = Vec::new();
    for path in paths {
        let file: PredictionsFile = load(path.as_ref(), parse_predictions)?;
        let n = usize::try_from(top_n).unwrap_or(usize::MAX);
        sets.extend(file.sets().map(|s| s.truncated(n)));
    }
    Ok(sets)
}
