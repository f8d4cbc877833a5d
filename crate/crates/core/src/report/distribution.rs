use serde::{Deserialize, Serialize};

use super::svg::box_plot;
use super::ReportError;
use crate::ingest::TestSetFile;
use crate::model::ScoreRecord;
use crate::scoring::{group_values, GroupSummary, Metric};
use crate::summary::five_number;

/// A group summary together with the raw values it summarizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionEntry {
    #[serde(flatten)]
    pub summary: GroupSummary,
    pub values: Vec<f64>,
}

/// Per (model, group, metric) raw values and summaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionExport {
    pub entries: Vec<DistributionEntry>,
}

impl DistributionExport {
    pub fn from_records(
        records: &[ScoreRecord],
        testset: &TestSetFile,
    ) -> Result<Self, ReportError> {
        let cells = group_values(records, testset)?;
        let entries = cells
            .into_iter()
            .map(|((model_id, group, metric), values)| DistributionEntry {
                summary: GroupSummary {
                    model_id,
                    group,
                    metric,
                    count: values.len(),
                    stats: five_number(&values).expect("cells are never empty"),
                },
                values,
            })
            .collect();
        Ok(Self { entries })
    }

    /// Summaries recomputed from the raw value lists.
    pub fn recompute(&self) -> Vec<GroupSummary> {
        self.entries
            .iter()
            .filter_map(|e| {
                Some(GroupSummary {
                    count: e.values.len(),
                    stats: five_number(&e.values)?,
                    ..e.summary.clone()
                })
            })
            .collect()
    }

    pub fn summaries(&self) -> Vec<GroupSummary> {
        self.entries.iter().map(|e| e.summary.clone()).collect()
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("exports serialize");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn metric(&self, metric: Metric) -> impl Iterator<Item = &DistributionEntry> {
        self.entries
            .iter()
            .filter(move |e| e.summary.metric == metric)
    }
}

/// Column order of the summary table.
pub const SUMMARY_COLUMNS: [&str; 10] = [
    "model", "group", "metric", "count", "min", "q1", "median", "q3", "max", "mean",
];

/// Tab-separated summary table with a header row. Numbers are written at
/// full precision (shortest round-trip form).
pub fn summary_table(summaries: &[GroupSummary]) -> String {
    let mut out = SUMMARY_COLUMNS.join("\t");
    out.push('\n');
    for s in summaries {
        let st = &s.stats;
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            s.model_id,
            s.group,
            s.metric,
            s.count,
            st.min,
            st.q1,
            st.median,
            st.q3,
            st.max,
            st.mean
        ));
    }
    out
}

/// Everything produced for the group distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionReport {
    pub export: DistributionExport,
    /// See [`summary_table`].
    pub table: String,
    pub beta_svg: String,
    pub delta_svg: String,
}

/// Renders the summary table and one box-plot graphic per metric.
///
/// `summaries` must be what [`crate::scoring::summarize`] gives for
/// `records`; any disagreement is reported as `Inconsistent`.
pub fn render_distribution(
    summaries: &[GroupSummary],
    records: &[ScoreRecord],
    testset: &TestSetFile,
) -> Result<DistributionReport, ReportError> {
    if records.is_empty() {
        return Err(ReportError::EmptyInput);
    }
    let export = DistributionExport::from_records(records, testset)?;
    let expected = export.summaries();
    if expected.as_slice() != summaries {
        return Err(ReportError::Inconsistent(format!(
            "{} summaries given, {} derived from the records, or values differ",
            summaries.len(),
            expected.len()
        )));
    }
    let beta_svg = box_plot(&export, Metric::Beta);
    let delta_svg = box_plot(&export, Metric::Delta);
    Ok(DistributionReport {
        table: summary_table(summaries),
        export,
        beta_svg,
        delta_svg,
    })
}
