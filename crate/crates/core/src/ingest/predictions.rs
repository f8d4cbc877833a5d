use std::collections::BTreeSet;

use serde::Serialize;
use serde_json::Value;

use super::fields::{self, Fields};
use super::testset::without;
use super::{
    decode, lines, to_line, Diagnostics, Entry, Extra, IngestError, IngestErrorKind, Locator,
    Parsed, Warning, FORMAT_VERSION,
};
use crate::model::{is_canonical, Prediction, PredictionSet, MASS_EPSILON};

pub const PREDICTIONS_FORMAT: &str = "diachron/predictions";

const HEADER_FIELDS: [&str; 7] = [
    "format",
    "format_version",
    "model",
    "adapter_version",
    "top_n",
    "timestamp",
    "probability_decimals",
];
const RECORD_FIELDS: [&str; 3] = ["model", "sentence", "predictions"];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PredictionsMeta {
    /// Default model for records that do not name one.
    pub model_id: Option<String>,
    pub adapter_version: Option<String>,
    pub top_n: Option<u64>,
    pub timestamp: Option<String>,
    /// Probabilities were rounded to this many decimals before recording.
    pub probability_decimals: Option<u32>,
    pub extra: Extra,
}

impl PredictionsMeta {
    /// How far the mass of `rows` rounded probabilities may exceed 1.
    pub fn mass_tolerance(&self, rows: usize) -> f64 {
        match self.probability_decimals {
            Some(d) => MASS_EPSILON + rows as f64 * 0.5 * 10f64.powi(-(d as i32)),
            None => MASS_EPSILON,
        }
    }
}

/// Prediction sets keyed by unique (model, sentence) pairs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PredictionsFile {
    pub meta: PredictionsMeta,
    sets: Vec<Entry<PredictionSet>>,
}

impl PredictionsFile {
    pub fn new(
        meta: PredictionsMeta,
        sets: Vec<Entry<PredictionSet>>,
    ) -> Result<Self, IngestErrorKind> {
        let mut seen = BTreeSet::new();
        for set in &sets {
            if !seen.insert((set.model_id(), set.sentence_id())) {
                return Err(IngestErrorKind::DuplicatePair {
                    model: set.model_id().to_owned(),
                    sentence: set.sentence_id().to_owned(),
                });
            }
            if let Some(top_n) = meta.top_n {
                if set.len() as u64 > top_n {
                    return Err(IngestErrorKind::TopNExceeded {
                        len: set.len(),
                        top_n,
                    });
                }
            }
        }
        Ok(Self { meta, sets })
    }

    pub fn entries(&self) -> &[Entry<PredictionSet>] {
        &self.sets
    }

    pub fn sets(&self) -> impl Iterator<Item = &PredictionSet> {
        self.sets.iter().map(|e| &e.value)
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }
}

pub fn parse_predictions(bytes: &[u8]) -> Result<Parsed<PredictionsFile>, Diagnostics> {
    let text = decode(bytes)?;
    let mut errors = Vec::new();
    let mut warnings = Vec::new();
    let mut meta = PredictionsMeta::default();
    let mut sets = Vec::new();
    let mut seen = BTreeSet::new();

    let mut rest = lines(text).peekable();
    match rest.peek() {
        None => warnings.push(Warning {
            locator: Locator::File,
            message: "empty predictions file".into(),
        }),
        Some(&(n, line)) => match fields::parse_object(line) {
            Ok(mut map) if map.contains_key("format") => {
                rest.next();
                match header(&mut map) {
                    Ok(m) => meta = m,
                    Err(kind) => errors.push(IngestError::new(Locator::Line(n), kind)),
                }
            }
            Ok(_) => {
                // treated as a record below
                errors.push(IngestError::new(
                    Locator::Line(n),
                    IngestErrorKind::MissingHeader,
                ));
            }
            Err(kind) => {
                rest.next();
                errors.push(IngestError::new(Locator::Line(n), kind));
            }
        },
    }

    for (n, line) in rest {
        let locator = Locator::Line(n);
        match record(line, &meta) {
            Ok((entry, resorted)) => {
                let key = (entry.model_id().to_owned(), entry.sentence_id().to_owned());
                if let Some(top_n) = meta.top_n.filter(|&t| entry.len() as u64 > t) {
                    errors.push(IngestError::new(
                        locator,
                        IngestErrorKind::TopNExceeded {
                            len: entry.len(),
                            top_n,
                        },
                    ));
                } else if seen.contains(&key) {
                    errors.push(IngestError::new(
                        locator,
                        IngestErrorKind::DuplicatePair {
                            model: key.0,
                            sentence: key.1,
                        },
                    ));
                } else {
                    if resorted {
                        warnings.push(Warning {
                            locator,
                            message: format!(
                                "predictions for ({}, {}) re-sorted into canonical order",
                                key.0, key.1
                            ),
                        });
                    }
                    seen.insert(key);
                    sets.push(entry);
                }
            }
            Err(kind) => errors.push(IngestError::new(locator, kind)),
        }
    }
    Diagnostics::check(errors)?;

    let file =
        PredictionsFile::new(meta, sets).map_err(|kind| IngestError::new(Locator::File, kind))?;
    Ok(Parsed {
        value: file,
        warnings,
    })
}

fn header(map: &mut Fields) -> Result<PredictionsMeta, IngestErrorKind> {
    fields::header(map, PREDICTIONS_FORMAT)?;
    let model_id = fields::opt_string(map, "model")?;
    let adapter_version = fields::opt_string(map, "adapter_version")?;
    let top_n = fields::opt_u64(map, "top_n")?;
    if top_n == Some(0) {
        return Err(IngestErrorKind::WrongType {
            field: "top_n",
            expected: "a positive integer",
        });
    }
    let timestamp = fields::opt_string(map, "timestamp")?;
    let probability_decimals = match fields::opt_u64(map, "probability_decimals")? {
        None => None,
        Some(d) if d <= 17 => Some(d as u32),
        Some(_) => {
            return Err(IngestErrorKind::WrongType {
                field: "probability_decimals",
                expected: "an integer between 0 and 17",
            })
        }
    };
    Ok(PredictionsMeta {
        model_id,
        adapter_version,
        top_n,
        timestamp,
        probability_decimals,
        extra: std::mem::take(map),
    })
}

/// Parses one record; the flag reports whether its rows had to be re-sorted.
fn record(
    line: &str,
    meta: &PredictionsMeta,
) -> Result<(Entry<PredictionSet>, bool), IngestErrorKind> {
    let mut map = fields::parse_object(line)?;
    let model = match fields::opt_string(&mut map, "model")? {
        Some(m) => m,
        None => meta
            .model_id
            .clone()
            .ok_or(IngestErrorKind::MissingField("model"))?,
    };
    let sentence = fields::string(&mut map, "sentence")?;
    let items = match map.remove("predictions") {
        Some(Value::Array(items)) => items,
        Some(_) => {
            return Err(IngestErrorKind::WrongType {
                field: "predictions",
                expected: "an array",
            })
        }
        None => return Err(IngestErrorKind::MissingField("predictions")),
    };
    let rows = items
        .iter()
        .map(prediction)
        .collect::<Result<Vec<_>, _>>()?;
    let resorted = !is_canonical(&rows);
    let tolerance = meta.mass_tolerance(rows.len());
    let set = PredictionSet::with_mass_tolerance(model, sentence, rows, tolerance)?;
    Ok((Entry::with_extra(set, map), resorted))
}

/// `{"token": "thou", "probability": 0.712}` or `["thou", 0.712]`.
fn prediction(item: &Value) -> Result<Prediction, IngestErrorKind> {
    let (token, probability) = match item {
        Value::Object(map) => {
            let token = match map.get("token") {
                Some(Value::String(t)) => t.clone(),
                Some(_) => {
                    return Err(IngestErrorKind::WrongType {
                        field: "token",
                        expected: "a string",
                    })
                }
                None => return Err(IngestErrorKind::MissingField("token")),
            };
            let p = map
                .get("probability")
                .ok_or(IngestErrorKind::MissingField("probability"))?;
            (token, fields::number_value(p, "probability")?)
        }
        Value::Array(pair) if pair.len() == 2 => match &pair[0] {
            Value::String(t) => (t.clone(), fields::number_value(&pair[1], "probability")?),
            _ => {
                return Err(IngestErrorKind::WrongType {
                    field: "token",
                    expected: "a string",
                })
            }
        },
        _ => {
            return Err(IngestErrorKind::WrongType {
                field: "predictions",
                expected: "a list of {token, probability} objects",
            })
        }
    };
    Ok(Prediction::new(token, probability)?)
}

#[derive(Serialize)]
struct HeaderOut<'a> {
    format: &'static str,
    format_version: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    model: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    adapter_version: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    top_n: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    probability_decimals: Option<u32>,
    #[serde(flatten)]
    extra: Extra,
}

#[derive(Serialize)]
struct RecordOut<'a> {
    model: &'a str,
    sentence: &'a str,
    predictions: &'a [Prediction],
    #[serde(flatten)]
    extra: Extra,
}

/// Serializes a predictions file as JSON Lines, header first.
pub fn write_predictions(file: &PredictionsFile) -> String {
    let meta = &file.meta;
    let mut out = to_line(&HeaderOut {
        format: PREDICTIONS_FORMAT,
        format_version: FORMAT_VERSION,
        model: meta.model_id.as_deref(),
        adapter_version: meta.adapter_version.as_deref(),
        top_n: meta.top_n,
        timestamp: meta.timestamp.as_deref(),
        probability_decimals: meta.probability_decimals,
        extra: without(&meta.extra, &HEADER_FIELDS),
    });
    out.push('\n');
    for entry in file.entries() {
        out.push_str(&to_line(&RecordOut {
            model: entry.model_id(),
            sentence: entry.sentence_id(),
            predictions: entry.predictions(),
            extra: without(&entry.extra, &RECORD_FIELDS),
        }));
        out.push('\n');
    }
    out
}
