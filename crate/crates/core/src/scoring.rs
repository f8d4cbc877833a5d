//! Bias and domain adequacy.
//!
//! The bias of a model on a sentence is the probability-weighted sum of the
//! sigma scores of its predicted tokens, using the recorded probabilities as
//! they are (no renormalization over the top-n rows). Domain adequacy is
//! `1 - |rho - beta| / 2`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{AnnotationStore, TestSetFile};
use crate::model::{PredictionSet, ScoreRecord, ScoreRow};
use crate::summary::{five_number, FiveNumber};
use crate::valence::{TemporalValence, VarietyGroup};

/// Allowed excess of |beta| over 1 before domain adequacy refuses it.
pub const BETA_EPSILON: f64 = 1e-9;

/// What to do with predicted tokens that have no sigma in the store.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MissingSigmaPolicy {
    /// Fail, naming every unannotated pair.
    #[default]
    Strict,
    /// Score missing tokens as neutral (0) and report them.
    NeutralFill,
}

/// A (sentence id, token) pair without an annotation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MissingPair {
    pub sentence_id: String,
    pub token: String,
}

impl fmt::Display for MissingPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {:?})", self.sentence_id, self.token)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScoringError {
    #[error("missing annotation for {}", list(.0))]
    MissingAnnotation(Vec<MissingPair>),
    #[error("beta {0} is outside [-1, 1]")]
    BetaOutOfRange(f64),
    #[error("prediction set of model {model:?} references unknown sentence {sentence:?}")]
    UnknownSentence { model: String, sentence: String },
    #[error("more than one prediction set for model {model:?}, sentence {sentence:?}")]
    DuplicatePredictionSet { model: String, sentence: String },
}

fn list(pairs: &[MissingPair]) -> String {
    pairs
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

/// A bias value with the aligned rows it was computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct Bias {
    pub value: f64,
    pub rows: Vec<ScoreRow>,
    /// Pairs scored as neutral under [`MissingSigmaPolicy::NeutralFill`].
    pub imputed: Vec<MissingPair>,
}

/// Probability-weighted sigma over aligned rows.
pub fn weighted_sigma(rows: &[ScoreRow]) -> f64 {
    rows.iter().map(|r| r.sigma.value() * r.probability).sum()
}

/// Computes the bias of one prediction set against the annotations.
pub fn bias(
    pred: &PredictionSet,
    store: &AnnotationStore,
    policy: MissingSigmaPolicy,
) -> Result<Bias, ScoringError> {
    let sentence = pred.sentence_id();
    let mut rows = Vec::with_capacity(pred.len());
    let mut missing = Vec::new();
    for p in pred.predictions() {
        let (sigma, imputed) = match store.sigma(sentence, p.token()) {
            Some(sigma) => (sigma, false),
            None => {
                missing.push(MissingPair {
                    sentence_id: sentence.to_owned(),
                    token: p.token().to_owned(),
                });
                (TemporalValence::NEUTRAL, true)
            }
        };
        rows.push(ScoreRow {
            token: p.token().to_owned(),
            probability: p.probability(),
            sigma,
            imputed,
        });
    }
    if policy == MissingSigmaPolicy::Strict && !missing.is_empty() {
        return Err(ScoringError::MissingAnnotation(missing));
    }
    Ok(Bias {
        value: weighted_sigma(&rows),
        rows,
        imputed: missing,
    })
}

/// `1 - |rho - beta| / 2`, clamped into [0, 1].
///
/// The result is exactly 1 iff `beta == rho`; a gap too small to survive
/// the subtraction still yields the largest value below 1.
pub fn domain_adequacy(rho: TemporalValence, beta: f64) -> Result<f64, ScoringError> {
    if beta.is_nan() || beta.abs() > 1.0 + BETA_EPSILON {
        return Err(ScoringError::BetaOutOfRange(beta));
    }
    let delta = (1.0 - 0.5 * (rho.value() - beta).abs()).clamp(0.0, 1.0);
    Ok(if beta == rho.value() {
        delta
    } else {
        delta.min(1.0f64.next_down())
    })
}

/// Output of [`score_all`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Scored {
    /// Sorted by (model id, sentence id).
    pub records: Vec<ScoreRecord>,
    /// Pairs scored as neutral under `NeutralFill`, sorted and deduplicated.
    pub imputed: Vec<MissingPair>,
}

/// Scores every prediction set against its sentence's rho.
///
/// Under `Strict` all missing pairs across all sets are collected before
/// failing, so one run lists everything still to annotate.
pub fn score_all<'a>(
    testset: &TestSetFile,
    sets: impl IntoIterator<Item = &'a PredictionSet>,
    store: &AnnotationStore,
    policy: MissingSigmaPolicy,
) -> Result<Scored, ScoringError> {
    let mut seen = BTreeSet::new();
    let mut records = Vec::new();
    let mut missing = BTreeSet::new();
    for set in sets {
        let sentence =
            testset
                .get(set.sentence_id())
                .ok_or_else(|| ScoringError::UnknownSentence {
                    model: set.model_id().to_owned(),
                    sentence: set.sentence_id().to_owned(),
                })?;
        if !seen.insert((set.model_id(), set.sentence_id())) {
            return Err(ScoringError::DuplicatePredictionSet {
                model: set.model_id().to_owned(),
                sentence: set.sentence_id().to_owned(),
            });
        }
        let b = bias(set, store, MissingSigmaPolicy::NeutralFill)?;
        missing.extend(b.imputed);
        let delta = domain_adequacy(sentence.rho(), b.value)?;
        records.push(ScoreRecord {
            model_id: set.model_id().to_owned(),
            sentence_id: set.sentence_id().to_owned(),
            rho: sentence.rho(),
            beta: b.value,
            delta,
            rows: b.rows,
        });
    }
    let missing: Vec<_> = missing.into_iter().collect();
    if policy == MissingSigmaPolicy::Strict && !missing.is_empty() {
        return Err(ScoringError::MissingAnnotation(missing));
    }
    records.sort_by(|a, b| (&a.model_id, &a.sentence_id).cmp(&(&b.model_id, &b.sentence_id)));
    Ok(Scored {
        records,
        imputed: missing,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Beta,
    Delta,
}

impl Metric {
    pub const ALL: [Self; 2] = [Self::Beta, Self::Delta];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Beta => "beta",
            Self::Delta => "delta",
        }
    }

    pub fn of(self, record: &ScoreRecord) -> f64 {
        match self {
            Self::Beta => record.beta,
            Self::Delta => record.delta,
        }
    }

    /// Natural plotting range of the metric.
    pub fn range(self) -> (f64, f64) {
        match self {
            Self::Beta => (-1.0, 1.0),
            Self::Delta => (0.0, 1.0),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Distribution of one metric for one model over one variety group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub model_id: String,
    pub group: VarietyGroup,
    pub metric: Metric,
    pub count: usize,
    #[serde(flatten)]
    pub stats: FiveNumber,
}

/// Raw metric values keyed by (model, group, metric).
pub type GroupCells = BTreeMap<(String, VarietyGroup, Metric), Vec<f64>>;

/// Raw metric values per (model, group, metric), in that key order.
pub fn group_values(
    records: &[ScoreRecord],
    testset: &TestSetFile,
) -> Result<GroupCells, ScoringError> {
    let mut cells: BTreeMap<_, Vec<f64>> = BTreeMap::new();
    for r in records {
        let group = testset
            .get(&r.sentence_id)
            .ok_or_else(|| ScoringError::UnknownSentence {
                model: r.model_id.clone(),
                sentence: r.sentence_id.clone(),
            })?
            .group();
        for metric in Metric::ALL {
            cells
                .entry((r.model_id.clone(), group, metric))
                .or_default()
                .push(metric.of(r));
        }
    }
    Ok(cells)
}

/// Five-number summaries and means per (model, group, metric).
pub fn summarize(
    records: &[ScoreRecord],
    testset: &TestSetFile,
) -> Result<Vec<GroupSummary>, ScoringError> {
    Ok(group_values(records, testset)?
        .into_iter()
        .map(|((model_id, group, metric), values)| GroupSummary {
            model_id,
            group,
            metric,
            count: values.len(),
            stats: five_number(&values).expect("cells are never empty"),
        })
        .collect())
}
