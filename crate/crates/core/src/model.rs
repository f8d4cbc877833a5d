//! Domain value types: test sentences, model predictions, human annotations
//! and computed scores. All of them are immutable once constructed.

use serde::Serialize;

use crate::error::CoreError;
use crate::valence::{TemporalValence, VarietyGroup};

/// Canonical mask marker inside sentence text.
pub const MASK: &str = "[MASK]";

/// Tolerance on the probability mass of a truncated prediction list.
pub const MASS_EPSILON: f64 = 1e-6;

/// One test sentence with a single mask slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskedSentence {
    id: String,
    text: String,
    rho: TemporalValence,
    group: VarietyGroup,
}

impl MaskedSentence {
    pub fn new(
        id: impl Into<String>,
        text: impl Into<String>,
        rho: TemporalValence,
        group: VarietyGroup,
    ) -> Result<Self, CoreError> {
        let id = id.into();
        let text = text.into();
        if id.trim().is_empty() {
            return Err(CoreError::EmptyId);
        }
        let found = text.matches(MASK).count();
        if found != 1 {
            return Err(CoreError::MaskCount { found });
        }
        if text.replacen(MASK, "", 1).trim().is_empty() {
            return Err(CoreError::EmptyText);
        }
        Ok(Self {
            id,
            text,
            rho,
            group,
        })
    }

    /// Like [`MaskedSentence::new`], but first rewrites every occurrence of
    /// `marker` to the canonical `[MASK]`.
    pub fn with_marker(
        id: impl Into<String>,
        text: &str,
        marker: &str,
        rho: TemporalValence,
        group: VarietyGroup,
    ) -> Result<Self, CoreError> {
        if marker.is_empty() || marker == MASK {
            return Self::new(id, text, rho, group);
        }
        Self::new(id, text.replace(marker, MASK), rho, group)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn rho(&self) -> TemporalValence {
        self.rho
    }

    pub fn group(&self) -> VarietyGroup {
        self.group
    }

    /// Text before and after the mask slot.
    pub fn split_at_mask(&self) -> (&str, &str) {
        self.text
            .split_once(MASK)
            .expect("mask presence checked at construction")
    }

    /// The sentence with `token` placed into the mask slot.
    pub fn fill(&self, token: &str) -> String {
        self.text.replacen(MASK, token, 1)
    }
}

/// True for vocabulary entries that are not whole words: continuation
/// pieces (`##ists`) and bracketed specials (`[UNK]`).
pub fn is_non_word_token(token: &str) -> bool {
    token.starts_with("##") || (token.len() > 2 && token.starts_with('[') && token.ends_with(']'))
}

/// A predicted token and its probability at the mask position.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    token: String,
    probability: f64,
}

impl Prediction {
    pub fn new(token: impl Into<String>, probability: f64) -> Result<Self, CoreError> {
        let token = token.into();
        if token.is_empty() {
            return Err(CoreError::EmptyToken);
        }
        if !(0.0..=1.0).contains(&probability) {
            return Err(CoreError::ProbabilityOutOfRange { token, probability });
        }
        Ok(Self { token, probability })
    }

    pub fn token(&self) -> &str {
        &self.token
    }

    pub fn probability(&self) -> f64 {
        self.probability
    }
}

/// The ranked top-n predictions of one model for one sentence.
///
/// Rows are kept in canonical order: probability descending, ties broken by
/// token in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionSet {
    model_id: String,
    sentence_id: String,
    predictions: Vec<Prediction>,
}

impl PredictionSet {
    pub fn new(
        model_id: impl Into<String>,
        sentence_id: impl Into<String>,
        predictions: Vec<Prediction>,
    ) -> Result<Self, CoreError> {
        Self::with_mass_tolerance(model_id, sentence_id, predictions, MASS_EPSILON)
    }

    /// Builds a set whose probability mass may exceed 1 by `tolerance`.
    /// Used for probabilities that were rounded before being recorded.
    pub fn with_mass_tolerance(
        model_id: impl Into<String>,
        sentence_id: impl Into<String>,
        mut predictions: Vec<Prediction>,
        tolerance: f64,
    ) -> Result<Self, CoreError> {
        let model_id = model_id.into();
        let sentence_id = sentence_id.into();
        if model_id.trim().is_empty() || sentence_id.trim().is_empty() {
            return Err(CoreError::EmptyId);
        }
        if predictions.is_empty() {
            return Err(CoreError::EmptyPredictions);
        }
        predictions.sort_by(canonical_order);
        let mut tokens: Vec<&str> = predictions.iter().map(|p| p.token.as_str()).collect();
        tokens.sort_unstable();
        if let Some(dup) = tokens.windows(2).find(|w| w[0] == w[1]) {
            return Err(CoreError::DuplicateToken(dup[0].to_owned()));
        }
        let mass: f64 = predictions.iter().map(|p| p.probability).sum();
        if mass > 1.0 + tolerance {
            return Err(CoreError::ProbabilityMassExceeded { mass, tolerance });
        }
        Ok(Self {
            model_id,
            sentence_id,
            predictions,
        })
    }

    pub fn model_id(&self) -> &str {
        &self.model_id
    }

    pub fn sentence_id(&self) -> &str {
        &self.sentence_id
    }

    pub fn predictions(&self) -> &[Prediction] {
        &self.predictions
    }

    pub fn len(&self) -> usize {
        self.predictions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predictions.is_empty()
    }

    /// Total probability mass of the listed rows.
    pub fn mass(&self) -> f64 {
        self.predictions.iter().map(|p| p.probability).sum()
    }

    /// Keeps only the first `n` rows (n >= 1).
    pub fn truncated(&self, n: usize) -> Self {
        let n = n.max(1);
        Self {
            model_id: self.model_id.clone(),
            sentence_id: self.sentence_id.clone(),
            predictions: self.predictions.iter().take(n).cloned().collect(),
        }
    }
}

/// Ordering used for prediction rows.
pub fn canonical_order(a: &Prediction, b: &Prediction) -> std::cmp::Ordering {
    b.probability
        .total_cmp(&a.probability)
        .then_with(|| a.token.cmp(&b.token))
}

/// Whether `rows` already follow [`canonical_order`].
pub fn is_canonical(rows: &[Prediction]) -> bool {
    rows.windows(2)
        .all(|w| canonical_order(&w[0], &w[1]) != std::cmp::Ordering::Greater)
}

/// A human-assigned sigma for a token in the context of one sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Annotation {
    pub sentence_id: String,
    pub token: String,
    pub sigma: TemporalValence,
    pub annotator: Option<String>,
    pub note: Option<String>,
}

impl Annotation {
    pub fn new(
        sentence_id: impl Into<String>,
        token: impl Into<String>,
        sigma: TemporalValence,
    ) -> Result<Self, CoreError> {
        let sentence_id = sentence_id.into();
        let token = token.into();
        if sentence_id.trim().is_empty() {
            return Err(CoreError::EmptyId);
        }
        if token.is_empty() {
            return Err(CoreError::EmptyToken);
        }
        Ok(Self {
            sentence_id,
            token,
            sigma,
            annotator: None,
            note: None,
        })
    }

    pub fn with_annotator(mut self, annotator: impl Into<String>) -> Self {
        self.annotator = Some(annotator.into());
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn key(&self) -> (&str, &str) {
        (&self.sentence_id, &self.token)
    }
}

/// One aligned row behind a score: the token, its probability and the sigma
/// used for it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreRow {
    pub token: String,
    pub probability: f64,
    pub sigma: TemporalValence,
    /// Sigma was not annotated and defaulted to neutral.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub imputed: bool,
}

/// Bias and domain adequacy of one model on one sentence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreRecord {
    pub model_id: String,
    pub sentence_id: String,
    pub rho: TemporalValence,
    pub beta: f64,
    pub delta: f64,
    pub rows: Vec<ScoreRow>,
}
