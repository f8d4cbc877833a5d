use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use super::fields::{self, Fields};
use super::testset::without;
use super::{
    decode, lines, to_line, Diagnostics, Entry, Extra, IngestError, IngestErrorKind, Locator,
    Parsed, Warning, FORMAT_VERSION,
};
use crate::model::Annotation;
use crate::valence::TemporalValence;

pub const ANNOTATIONS_FORMAT: &str = "diachron/annotations";

const HEADER_FIELDS: [&str; 4] = ["format", "format_version", "scale", "annotators"];
const RECORD_FIELDS: [&str; 5] = ["sentence", "token", "sigma", "annotator", "note"];

const DEFAULT_SCALE: &str = "-1 farthest historical period, -0.5, 0 neutral, 0.5, 1 present day";

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationMeta {
    pub scale: Option<String>,
    pub annotators: Vec<String>,
    pub extra: Extra,
}

impl Default for AnnotationMeta {
    fn default() -> Self {
        Self {
            scale: Some(DEFAULT_SCALE.to_owned()),
            annotators: Vec::new(),
            extra: Extra::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StoreError {
    #[error("({sentence:?}, {token:?}) is already annotated")]
    DuplicateKey { sentence: String, token: String },
    #[error("({sentence:?}, {token:?}) has no annotation to amend")]
    NotAnnotated { sentence: String, token: String },
}

/// Sigma annotations keyed by (sentence id, token), in insertion order.
#[derive(Debug, Clone, Default)]
pub struct AnnotationStore {
    pub meta: AnnotationMeta,
    entries: Vec<Entry<Annotation>>,
    index: HashMap<(String, String), usize>,
}

impl PartialEq for AnnotationStore {
    fn eq(&self, other: &Self) -> bool {
        self.meta == other.meta && self.entries == other.entries
    }
}

impl AnnotationStore {
    pub fn new(meta: AnnotationMeta) -> Self {
        Self {
            meta,
            ..Self::default()
        }
    }

    pub fn from_annotations(
        annotations: impl IntoIterator<Item = Annotation>,
    ) -> Result<Self, StoreError> {
        let mut store = Self::new(AnnotationMeta::default());
        for a in annotations {
            store.insert(a)?;
        }
        Ok(store)
    }

    pub fn insert(&mut self, annotation: Annotation) -> Result<(), StoreError> {
        self.insert_entry(Entry::new(annotation))
    }

    pub fn insert_entry(&mut self, entry: Entry<Annotation>) -> Result<(), StoreError> {
        let key = (entry.sentence_id.clone(), entry.token.clone());
        if self.index.contains_key(&key) {
            return Err(StoreError::DuplicateKey {
                sentence: key.0,
                token: key.1,
            });
        }
        if let Some(name) = &entry.annotator {
            if !self.meta.annotators.contains(name) {
                self.meta.annotators.push(name.clone());
            }
        }
        self.index.insert(key, self.entries.len());
        self.entries.push(entry);
        Ok(())
    }

    /// Replaces the sigma of an existing annotation and records the prior
    /// value in its note. Returns the prior sigma.
    pub fn amend(
        &mut self,
        sentence_id: &str,
        token: &str,
        sigma: TemporalValence,
        annotator: Option<&str>,
    ) -> Result<TemporalValence, StoreError> {
        let key = (sentence_id.to_owned(), token.to_owned());
        let &i = self.index.get(&key).ok_or(StoreError::NotAnnotated {
            sentence: key.0,
            token: key.1,
        })?;
        let entry = &mut self.entries[i].value;
        let prior = entry.sigma;
        let mut record = format!("amended from {prior}");
        if let Some(who) = &entry.annotator {
            record.push_str(&format!(" (by {who})"));
        }
        entry.note = Some(match entry.note.take() {
            Some(old) => format!("{old}; {record}"),
            None => record,
        });
        entry.sigma = sigma;
        if let Some(name) = annotator {
            entry.annotator = Some(name.to_owned());
            if !self.meta.annotators.iter().any(|a| a == name) {
                self.meta.annotators.push(name.to_owned());
            }
        }
        Ok(prior)
    }

    pub fn get(&self, sentence_id: &str, token: &str) -> Option<&Annotation> {
        // HashMap<(String, String)> cannot be probed with borrowed pairs
        self.index
            .get(&(sentence_id.to_owned(), token.to_owned()))
            .map(|&i| &self.entries[i].value)
    }

    pub fn sigma(&self, sentence_id: &str, token: &str) -> Option<TemporalValence> {
        self.get(sentence_id, token).map(|a| a.sigma)
    }

    pub fn contains(&self, sentence_id: &str, token: &str) -> bool {
        self.get(sentence_id, token).is_some()
    }

    pub fn entries(&self) -> &[Entry<Annotation>] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = &Annotation> {
        self.entries.iter().map(|e| &e.value)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn parse_annotations(bytes: &[u8]) -> Result<Parsed<AnnotationStore>, Diagnostics> {
    let text = decode(bytes)?;
    let mut errors = Vec::new();
    let mut warnings = Vec::new();
    let mut store = AnnotationStore::new(AnnotationMeta {
        scale: None,
        ..AnnotationMeta::default()
    });

    let mut rest = lines(text).peekable();
    match rest.peek() {
        None => {
            warnings.push(Warning {
                locator: Locator::File,
                message: "empty annotation store".into(),
            });
            store.meta = AnnotationMeta::default();
        }
        Some(&(n, line)) => match fields::parse_object(line) {
            Ok(mut map) if map.contains_key("format") => {
                rest.next();
                match header(&mut map) {
                    Ok(meta) => store.meta = meta,
                    Err(kind) => errors.push(IngestError::new(Locator::Line(n), kind)),
                }
            }
            Ok(_) => errors.push(IngestError::new(
                Locator::Line(n),
                IngestErrorKind::MissingHeader,
            )),
            Err(kind) => {
                rest.next();
                errors.push(IngestError::new(Locator::Line(n), kind));
            }
        },
    }

    for (n, line) in rest {
        let result = record(line).and_then(|entry| {
            store.insert_entry(entry).map_err(|e| match e {
                StoreError::DuplicateKey { sentence, token } => {
                    IngestErrorKind::DuplicateKey { sentence, token }
                }
                StoreError::NotAnnotated { .. } => unreachable!("insert never amends"),
            })
        });
        if let Err(kind) = result {
            errors.push(IngestError::new(Locator::Line(n), kind));
        }
    }
    Diagnostics::check(errors)?;
    Ok(Parsed {
        value: store,
        warnings,
    })
}

fn header(map: &mut Fields) -> Result<AnnotationMeta, IngestErrorKind> {
    fields::header(map, ANNOTATIONS_FORMAT)?;
    let scale = fields::opt_string(map, "scale")?;
    let wrong = IngestErrorKind::WrongType {
        field: "annotators",
        expected: "a list of strings",
    };
    let annotators = match map.remove("annotators") {
        None | Some(serde_json::Value::Null) => Vec::new(),
        Some(serde_json::Value::Array(items)) => items
            .into_iter()
            .map(|v| match v {
                serde_json::Value::String(s) => Ok(s),
                _ => Err(wrong.clone()),
            })
            .collect::<Result<_, _>>()?,
        Some(_) => return Err(wrong),
    };
    Ok(AnnotationMeta {
        scale,
        annotators,
        extra: std::mem::take(map),
    })
}

fn record(line: &str) -> Result<Entry<Annotation>, IngestErrorKind> {
    let mut map = fields::parse_object(line)?;
    let sentence = fields::string(&mut map, "sentence")?;
    let token = fields::string(&mut map, "token")?;
    let sigma = fields::valence(&mut map, "sigma")?;
    let mut annotation = Annotation::new(sentence, token, sigma)?;
    annotation.annotator = fields::opt_string(&mut map, "annotator")?;
    annotation.note = fields::opt_string(&mut map, "note")?;
    Ok(Entry::with_extra(annotation, map))
}

#[derive(Serialize)]
struct HeaderOut<'a> {
    format: &'static str,
    format_version: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    scale: Option<&'a str>,
    annotators: &'a [String],
    #[serde(flatten)]
    extra: Extra,
}

#[derive(Serialize)]
struct RecordOut<'a> {
    sentence: &'a str,
    token: &'a str,
    sigma: TemporalValence,
    #[serde(skip_serializing_if = "Option::is_none")]
    annotator: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'a str>,
    #[serde(flatten)]
    extra: Extra,
}

/// Serializes the store as JSON Lines, header first, records in insertion
/// order.
pub fn write_annotations(store: &AnnotationStore) -> String {
    let mut out = to_line(&HeaderOut {
        format: ANNOTATIONS_FORMAT,
        format_version: FORMAT_VERSION,
        scale: store.meta.scale.as_deref(),
        annotators: &store.meta.annotators,
        extra: without(&store.meta.extra, &HEADER_FIELDS),
    });
    out.push('\n');
    for entry in store.entries() {
        out.push_str(&to_line(&RecordOut {
            sentence: &entry.sentence_id,
            token: &entry.token,
            sigma: entry.sigma,
            annotator: entry.annotator.as_deref(),
            note: entry.note.as_deref(),
            extra: without(&entry.extra, &RECORD_FIELDS),
        }));
        out.push('\n');
    }
    out
}
