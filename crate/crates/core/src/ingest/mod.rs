//! On-disk formats: test sets, prediction files, annotation stores and score
//! exports.
//!
//! The test set is a single JSON document. The other three are JSON Lines:
//! a header object on the first non-blank line, then one record per line.
//! Every header carries `format` and `format_version`. Fields a reader does
//! not know are kept in [`Entry::extra`] and written back unchanged.
//!
//! Parsers validate every record and report all violations they find, each
//! with a locator, instead of stopping at the first.

mod annotations;
mod fields;
mod predictions;
mod scores;
mod testset;

use std::fmt;
use std::io::{self, Write};
use std::ops::Deref;
use std::path::Path;

use serde_json::{Map, Value};
use thiserror::Error;

use crate::error::CoreError;

pub use annotations::{
    parse_annotations, write_annotations, AnnotationMeta, AnnotationStore, StoreError,
    ANNOTATIONS_FORMAT,
};
pub use predictions::{
    parse_predictions, write_predictions, PredictionsFile, PredictionsMeta, PREDICTIONS_FORMAT,
};
pub use scores::{parse_scores, write_scores, SCORES_FORMAT};
pub use testset::{
    parse_test_set, parse_test_set_with, write_test_set, ParseOptions, TestSetFile, TestSetMeta,
    TESTSET_FORMAT,
};

/// Version written into, and required from, every file header.
pub const FORMAT_VERSION: u64 = 1;

/// Unknown fields carried along with a record.
pub type Extra = Map<String, Value>;

/// A parsed value plus whatever unknown fields its record carried.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry<T> {
    pub value: T,
    pub extra: Extra,
}

impl<T> Entry<T> {
    pub fn new(value: T) -> Self {
        Self {
            value,
            extra: Extra::new(),
        }
    }

    pub fn with_extra(value: T, extra: Extra) -> Self {
        Self { value, extra }
    }
}

impl<T> Deref for Entry<T> {
    type Target = T;

    fn deref(&self) -> &T {
        &self.value
    }
}

impl<T> From<T> for Entry<T> {
    fn from(value: T) -> Self {
        Self::new(value)
    }
}

/// Where in an input a problem was found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Locator {
    /// A whole file (e.g. not UTF-8 or empty).
    File,
    /// 1-based line of a line-delimited file.
    Line(usize),
    /// 1-based line and column inside a JSON document.
    Position { line: usize, column: usize },
    /// 0-based position in the test set's sentence list.
    Sentence { index: usize, id: Option<String> },
}

impl fmt::Display for Locator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Locator::File => f.write_str("file"),
            Locator::Line(n) => write!(f, "line {n}"),
            Locator::Position { line, column } => write!(f, "line {line}, column {column}"),
            Locator::Sentence {
                index,
                id: Some(id),
            } => write!(f, "sentence #{index} ({id})"),
            Locator::Sentence { index, id: None } => write!(f, "sentence #{index}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IngestErrorKind {
    #[error("input is not valid UTF-8")]
    NotUtf8,
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("missing header line")]
    MissingHeader,
    #[error("expected format {expected:?}, found {found:?}")]
    WrongFormat {
        expected: &'static str,
        found: String,
    },
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u64),
    #[error("missing field {0:?}")]
    MissingField(&'static str),
    #[error("field {field:?} must be {expected}")]
    WrongType {
        field: &'static str,
        expected: &'static str,
    },
    #[error(transparent)]
    Invalid(#[from] CoreError),
    #[error("duplicate sentence id {0:?}")]
    DuplicateId(String),
    #[error("duplicate annotation key ({sentence:?}, {token:?})")]
    DuplicateKey { sentence: String, token: String },
    #[error("duplicate prediction set for model {model:?}, sentence {sentence:?}")]
    DuplicatePair { model: String, sentence: String },
    #[error("{len} predictions exceed the declared top_n of {top_n}")]
    TopNExceeded { len: usize, top_n: u64 },
    #[error("delta {delta} does not equal 1 - |rho - beta| / 2 for beta {beta}")]
    InconsistentScore { beta: f64, delta: f64 },
}

impl IngestErrorKind {
    /// Short diagnostic code.
    pub fn code(&self) -> &'static str {
        match self {
            Self::NotUtf8 | Self::Syntax(_) | Self::MissingHeader | Self::WrongFormat { .. } => {
                "SyntaxError"
            }
            Self::UnsupportedVersion(_) => "UnsupportedVersion",
            Self::MissingField(_) | Self::WrongType { .. } => "SyntaxError",
            Self::Invalid(e) => match e {
                CoreError::ValenceOutOfScale(_) => "ValenceOutOfScale",
                CoreError::MaskCount { .. } | CoreError::EmptyText => "MaskCountError",
                CoreError::ProbabilityOutOfRange { .. } => "ProbabilityOutOfRange",
                CoreError::DuplicateToken(_) => "DuplicateToken",
                CoreError::ProbabilityMassExceeded { .. } => "ProbabilityMassExceeded",
                CoreError::EmptyId | CoreError::EmptyToken | CoreError::EmptyPredictions => {
                    "InvalidRecord"
                }
            },
            Self::DuplicateId(_) => "DuplicateId",
            Self::DuplicateKey { .. } => "DuplicateKey",
            Self::DuplicatePair { .. } => "DuplicatePair",
            Self::TopNExceeded { .. } => "TopNExceeded",
            Self::InconsistentScore { .. } => "InconsistentScore",
        }
    }
}

/// One located parse or validation failure.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{locator}: {kind}")]
pub struct IngestError {
    pub locator: Locator,
    pub kind: IngestErrorKind,
}

impl IngestError {
    pub fn new(locator: Locator, kind: impl Into<IngestErrorKind>) -> Self {
        Self {
            locator,
            kind: kind.into(),
        }
    }
}

/// All failures found in one input. Never empty.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics(Vec<IngestError>);

impl Diagnostics {
    pub fn errors(&self) -> &[IngestError] {
        &self.0
    }

    pub fn first(&self) -> &IngestError {
        &self.0[0]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_errors(self) -> Vec<IngestError> {
        self.0
    }

    fn check(errors: Vec<IngestError>) -> Result<(), Self> {
        if errors.is_empty() {
            Ok(())
        } else {
            Err(Self(errors))
        }
    }
}

impl From<IngestError> for Diagnostics {
    fn from(e: IngestError) -> Self {
        Self(vec![e])
    }
}

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for Diagnostics {}

/// Something a parser accepted but changed or found noteworthy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Warning {
    pub locator: Locator,
    pub message: String,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.locator, self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Parsed<T> {
    pub value: T,
    pub warnings: Vec<Warning>,
}

impl<T> Parsed<T> {
    pub fn into_value(self) -> T {
        self.value
    }
}

/// Writes `bytes` to a temporary file next to `path`, then renames it into
/// place, so `path` never holds a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn decode(bytes: &[u8]) -> Result<&str, IngestError> {
    std::str::from_utf8(bytes).map_err(|e| {
        let line = bytes[..e.valid_up_to()]
            .iter()
            .filter(|&&b| b == b'\n')
            .count()
            + 1;
        IngestError::new(Locator::Line(line), IngestErrorKind::NotUtf8)
    })
}

/// Non-blank lines with their 1-based numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn to_line(value: &impl serde::Serialize) -> String {
    serde_json::to_string(value).expect("records serialize to JSON")
}
