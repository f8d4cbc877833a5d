use std::path::Path;

use anyhow::{Context, Result};
use diachron_core::ingest::{write_atomic, TestSetFile};
use diachron_core::report::{
    box_plot, format_fixed, render_all_tables, render_distribution, summary_table,
    DistributionExport,
};
use diachron_core::{summarize, GroupSummary, Metric, ScoreRecord};

pub const SCORES_FILE: &str = "scores.jsonl";
pub const SUMMARY_FILE: &str = "summaries.tsv";
pub const DISTRIBUTION_FILE: &str = "distribution.json";
pub const TABLES_TEXT_FILE: &str = "tables.txt";
pub const TABLES_JSON_FILE: &str = "tables.json";
pub const BETA_SVG_FILE: &str = "beta.svg";
pub const DELTA_SVG_FILE: &str = "delta.svg";

pub fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    write_atomic(&path, contents.as_bytes())
        .with_context(|| format!("cannot write {}", path.display()))
}

/// Writes every derived output for `records` into `dir` and prints a digest
/// line per (model, group).
pub fn render(
    dir: &Path,
    records: &[ScoreRecord],
    testset: &TestSetFile,
    precision: usize,
) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let summaries = summarize(records, testset)?;

    let (export, table, beta_svg, delta_svg) = if records.is_empty() {
        // nothing scored: still emit well-formed, empty outputs
        let export = DistributionExport { entries: vec![] };
        let beta = box_plot(&export, Metric::Beta);
        let delta = box_plot(&export, Metric::Delta);
        (export, summary_table(&[]), beta, delta)
    } else {
        let r = render_distribution(&summaries, records, testset)?;
        (r.export, r.table, r.beta_svg, r.delta_svg)
    };

    let tables = render_all_tables(records, testset)?;
    let text: Vec<String> = tables.iter().map(|t| t.to_text(precision)).collect();
    let mut json = serde_json::to_string_pretty(&tables)?;
    json.push('\n');

    write(dir, SUMMARY_FILE, &table)?;
    write(dir, DISTRIBUTION_FILE, &export.to_json())?;
    write(dir, TABLES_TEXT_FILE, &text.join("\n"))?;
    write(dir, TABLES_JSON_FILE, &json)?;
    write(dir, BETA_SVG_FILE, &beta_svg)?;
    write(dir, DELTA_SVG_FILE, &delta_svg)?;

    for line in digest(&summaries, precision) {
        println!("{line}");
    }
    Ok(())
}

/// `model  group  n=..  beta mean ..  delta mean ..`, one line per cell.
fn digest(summaries: &[GroupSummary], precision: usize) -> Vec<String> {
    let model_w = summaries
        .iter()
        .map(|s| s.model_id.len())
        .max()
        .unwrap_or(0);
    summaries
        .iter()
        .filter(|s| s.metric == Metric::Beta)
        .map(|b| {
            let delta = summaries
                .iter()
                .find(|d| {
                    d.metric == Metric::Delta && d.model_id == b.model_id && d.group == b.group
                })
                .expect("both metrics are summarized for every cell");
            format!(
                "{:<model_w$}  {:<7}  n={:<3}  beta mean {:>w$}  delta mean {:>w$}",
                b.model_id,
                b.group.to_string(),
                b.count,
                format_fixed(b.stats.mean, precision),
                format_fixed(delta.stats.mean, precision),
                w = precision + 3,
            )
        })
        .collect()
}
