//! Diachronic bias and domain adequacy of masked language models.
//!
//! Predictions of a fill-mask model for a test sentence are scored against
//! human sigma annotations on the five-point temporal valence scale:
//!
//! * **bias** (`beta`) is the probability-weighted sigma of the top-n tokens;
//! * **domain adequacy** (`delta`) is `1 - |rho - beta| / 2`, where `rho` is
//!   the sentence's own valence.
//!
//! [`ingest`] reads and writes the on-disk formats, [`scoring`] computes and
//! aggregates the metrics, [`annotation`] drives the labeling workflow and
//! [`report`] renders tables and box plots.

pub mod annotation;
pub mod error;
pub mod ingest;
pub mod model;
pub mod report;
pub mod scoring;
pub mod summary;
pub mod valence;

pub use error::CoreError;
pub use model::{
    is_non_word_token, Annotation, MaskedSentence, Prediction, PredictionSet, ScoreRecord,
    ScoreRow, MASK, MASS_EPSILON,
};
pub use scoring::{
    bias, domain_adequacy, score_all, summarize, GroupSummary, Metric, MissingSigmaPolicy,
    ScoringError,
};
pub use valence::{TemporalValence, VarietyGroup};
