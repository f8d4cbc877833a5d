//! Per-sentence score tables and group distribution outputs.

mod distribution;
mod format;
mod svg;
mod table;

use thiserror::Error;

use crate::scoring::ScoringError;

pub use distribution::{
    render_distribution, summary_table, DistributionEntry, DistributionExport, DistributionReport,
    SUMMARY_COLUMNS,
};
pub use format::format_fixed;
pub use svg::box_plot;
pub use table::{render_all_tables, render_sentence_table, ModelColumn, SentenceTable};

/// Default number of decimals in human-readable output.
pub const DISPLAY_PRECISION: usize = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReportError {
    #[error("nothing to report: no score records")]
    EmptyInput,
    #[error("records span more than one sentence ({0:?} and {1:?})")]
    MixedSentences(String, String),
    #[error("unknown sentence {0:?}")]
    UnknownSentence(String),
    #[error("summaries do not match records: {0}")]
    Inconsistent(String),
}

impl From<ScoringError> for ReportError {
    fn from(e: ScoringError) -> Self {
        match e {
            ScoringError::UnknownSentence { sentence, .. } => Self::UnknownSentence(sentence),
            other => Self::Inconsistent(other.to_string()),
        }
    }
}
