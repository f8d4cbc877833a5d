use std::process::ExitCode;

use anyhow::{Context, Result};
use diachron_core::annotation::{load_store, save_store, StoreLock};
use diachron_core::TemporalValence;

use crate::AmendArgs;

pub fn run(args: &AmendArgs) -> Result<ExitCode> {
    let sigma: TemporalValence = args
        .sigma
        .parse()
        .with_context(|| format!("invalid sigma {:?}", args.sigma))?;
    anyhow::ensure!(
        args.store.exists(),
        "annotation store {} does not exist",
        args.store.display()
    );
    let _lock = StoreLock::acquire(&args.store)?;
    let (mut store, _) = load_store(&args.store)?;
    let prior = store.amend(
        &args.sentence,
        &args.token,
        sigma,
        args.annotator.as_deref(),
    )?;
    save_store(&args.store, &store)
        .with_context(|| format!("cannot write {}", args.store.display()))?;
    println!("{} {:?}: {prior} -> {sigma}", args.sentence, args.token);
    Ok(ExitCode::SUCCESS)
}
