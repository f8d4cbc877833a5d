use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use super::fields::{self, Fields};
use super::{
    decode, Diagnostics, Entry, Extra, IngestError, IngestErrorKind, Locator, Parsed,
    FORMAT_VERSION,
};
use crate::model::MaskedSentence;
use crate::valence::{TemporalValence, VarietyGroup};

pub const TESTSET_FORMAT: &str = "diachron/testset";

const SENTENCE_FIELDS: [&str; 4] = ["id", "text", "rho", "group"];
const HEADER_FIELDS: [&str; 5] = ["format", "format_version", "name", "version", "sentences"];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TestSetMeta {
    pub name: Option<String>,
    pub version: Option<String>,
    pub extra: Extra,
}

/// A validated collection of test sentences with unique ids.
#[derive(Debug, Clone)]
pub struct TestSetFile {
    pub meta: TestSetMeta,
    sentences: Vec<Entry<MaskedSentence>>,
    index: BTreeMap<String, usize>,
}

impl PartialEq for TestSetFile {
    fn eq(&self, other: &Self) -> bool {
        self.meta == other.meta && self.sentences == other.sentences
    }
}

impl TestSetFile {
    /// Fails with `DuplicateId` on the first repeated sentence id.
    pub fn new(
        meta: TestSetMeta,
        sentences: Vec<Entry<MaskedSentence>>,
    ) -> Result<Self, IngestError> {
        let mut index = BTreeMap::new();
        for (i, s) in sentences.iter().enumerate() {
            if index.insert(s.id().to_owned(), i).is_some() {
                return Err(IngestError::new(
                    Locator::Sentence {
                        index: i,
                        id: Some(s.id().to_owned()),
                    },
                    IngestErrorKind::DuplicateId(s.id().to_owned()),
                ));
            }
        }
        Ok(Self {
            meta,
            sentences,
            index,
        })
    }

    pub fn from_sentences(sentences: Vec<MaskedSentence>) -> Result<Self, IngestError> {
        Self::new(
            TestSetMeta::default(),
            sentences.into_iter().map(Entry::new).collect(),
        )
    }

    pub fn entries(&self) -> &[Entry<MaskedSentence>] {
        &self.sentences
    }

    pub fn sentences(&self) -> impl Iterator<Item = &MaskedSentence> {
        self.sentences.iter().map(|e| &e.value)
    }

    pub fn get(&self, id: &str) -> Option<&MaskedSentence> {
        self.index.get(id).map(|&i| &self.sentences[i].value)
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }
}

/// Reader settings for test sets.
#[derive(Debug, Clone, Default)]
pub struct ParseOptions {
    /// Alternative mask marker rewritten to `[MASK]` while parsing.
    pub mask_marker: Option<String>,
}

pub fn parse_test_set(bytes: &[u8]) -> Result<Parsed<TestSetFile>, Diagnostics> {
    parse_test_set_with(bytes, &ParseOptions::default())
}

pub fn parse_test_set_with(
    bytes: &[u8],
    options: &ParseOptions,
) -> Result<Parsed<TestSetFile>, Diagnostics> {
    let text = decode(bytes)?;
    let doc: Value = serde_json::from_str(text).map_err(|e| {
        IngestError::new(
            Locator::Position {
                line: e.line(),
                column: e.column(),
            },
            IngestErrorKind::Syntax(e.to_string()),
        )
    })?;
    let at_file = |kind: IngestErrorKind| IngestError::new(Locator::File, kind);

    let mut doc = fields::object(doc).map_err(at_file)?;
    fields::header(&mut doc, TESTSET_FORMAT).map_err(at_file)?;
    let name = fields::opt_string(&mut doc, "name").map_err(at_file)?;
    let version = fields::opt_string(&mut doc, "version").map_err(at_file)?;
    let records = match doc.remove("sentences") {
        Some(Value::Array(items)) => items,
        Some(_) => {
            return Err(at_file(IngestErrorKind::WrongType {
                field: "sentences",
                expected: "an array",
            })
            .into())
        }
        None => return Err(at_file(IngestErrorKind::MissingField("sentences")).into()),
    };

    let mut errors = Vec::new();
    let mut sentences = Vec::with_capacity(records.len());
    let mut seen = BTreeMap::new();
    for (index, record) in records.into_iter().enumerate() {
        let id_hint = record.get("id").and_then(Value::as_str).map(str::to_owned);
        let locator = Locator::Sentence { index, id: id_hint };
        match sentence(record, options) {
            Ok(entry) => {
                if seen.insert(entry.id().to_owned(), index).is_some() {
                    errors.push(IngestError::new(
                        locator,
                        IngestErrorKind::DuplicateId(entry.id().to_owned()),
                    ));
                } else {
                    sentences.push(entry);
                }
            }
            Err(kind) => errors.push(IngestError::new(locator, kind)),
        }
    }
    Diagnostics::check(errors)?;

    let meta = TestSetMeta {
        name,
        version,
        extra: doc,
    };
    let file = TestSetFile::new(meta, sentences)?;
    Ok(Parsed {
        value: file,
        warnings: Vec::new(),
    })
}

fn sentence(
    record: Value,
    options: &ParseOptions,
) -> Result<Entry<MaskedSentence>, IngestErrorKind> {
    let mut map: Fields = fields::object(record)?;
    let id = fields::string(&mut map, "id")?;
    let text = fields::string(&mut map, "text")?;
    let rho = fields::valence(&mut map, "rho")?;
    let group: VarietyGroup =
        fields::string(&mut map, "group")?
            .parse()
            .map_err(|_| IngestErrorKind::WrongType {
                field: "group",
                expected: "one of EME, Neutral, ME",
            })?;
    let sentence = match &options.mask_marker {
        Some(marker) => MaskedSentence::with_marker(id, &text, marker, rho, group)?,
        None => MaskedSentence::new(id, text, rho, group)?,
    };
    Ok(Entry::with_extra(sentence, map))
}

#[derive(Serialize)]
struct SentenceOut<'a> {
    id: &'a str,
    text: &'a str,
    rho: TemporalValence,
    group: VarietyGroup,
    #[serde(flatten)]
    extra: Extra,
}

#[derive(Serialize)]
struct DocumentOut<'a> {
    format: &'static str,
    format_version: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    version: Option<&'a str>,
    #[serde(flatten)]
    extra: Extra,
    sentences: Vec<SentenceOut<'a>>,
}

pub(super) fn without(extra: &Extra, reserved: &[&str]) -> Extra {
    extra
        .iter()
        .filter(|(k, _)| !reserved.contains(&k.as_str()))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect()
}

/// Serializes a test set as a pretty-printed JSON document.
pub fn write_test_set(file: &TestSetFile) -> String {
    let doc = DocumentOut {
        format: TESTSET_FORMAT,
        format_version: FORMAT_VERSION,
        name: file.meta.name.as_deref(),
        version: file.meta.version.as_deref(),
        extra: without(&file.meta.extra, &HEADER_FIELDS),
        sentences: file
            .entries()
            .iter()
            .map(|e| SentenceOut {
                id: e.id(),
                text: e.text(),
                rho: e.rho(),
                group: e.group(),
                extra: without(&e.extra, &SENTENCE_FIELDS),
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("test set serializes");
    out.push('\n');
    out
}
