use std::io::{self, IsTerminal};
use std::process::ExitCode;

use anyhow::{Context, Result};
use diachron_core::annotation::{
    build_queue, load_store, run_session, save_store, SessionOptions, StoreLock,
};
use diachron_core::ingest::AnnotationStore;

use crate::inputs::{load_prediction_sets, load_testset};
use crate::AnnotateArgs;

/// Bold highlighting only on a terminal, and never when `NO_COLOR` is set.
fn use_color() -> bool {
    let disabled = std::env::var_os("NO_COLOR").is_some_and(|v| !v.is_empty());
    !disabled && io::stdout().is_terminal()
}

pub fn run(args: &AnnotateArgs) -> Result<ExitCode> {
    let testset = load_testset(&args.testset)?;
    let sets = load_prediction_sets(&args.predictions, args.top_n)?;
    let _lock = StoreLock::acquire(&args.store)?;
    let (mut store, warnings) = load_store(&args.store)?;
    for w in warnings {
        eprintln!("{}: warning: {w}", args.store.display());
    }
    let queue = build_queue(&testset, &sets, &store)?;
    if queue.is_empty() {
        println!(
            "nothing to annotate ({} pairs already annotated)",
            queue.done_count
        );
        return Ok(ExitCode::SUCCESS);
    }
    println!(
        "{} pairs to annotate, {} already annotated; answers are saved as you go",
        queue.len(),
        queue.done_count
    );

    let path = args.store.clone();
    let mut persist = |s: &AnnotationStore| save_store(&path, s);
    let options = SessionOptions {
        reveal_probabilities: args.reveal_probabilities,
        annotator: args.annotator.clone(),
        color: use_color(),
    };
    let summary = run_session(
        &queue,
        &mut store,
        io::stdin().lock(),
        io::stdout().lock(),
        &mut persist,
        &options,
    )
    .with_context(|| format!("annotation session on {} failed", args.store.display()))?;
    println!(
        "answered {}, skipped {}, {} left for a later session",
        summary.answered,
        summary.skipped,
        summary.skipped + summary.unvisited
    );
    Ok(ExitCode::SUCCESS)
}
