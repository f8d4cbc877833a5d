//! Terminal workflow for assigning sigma scores.
//!
//! Tokens predicted by any model are pooled per sentence, so each
//! (sentence, token) pair is annotated once regardless of how many models
//! proposed it. The session shows each candidate inside its sentence and
//! saves the store after every answer.
//!
//! Prompt protocol, one answer per line:
//!
//! | input                          | effect                            |
//! |--------------------------------|-----------------------------------|
//! | `-1`, `-0.5`, `0`, `0.5`, `1`  | record sigma, go to next item     |
//! | `skip` or `s`                  | leave pending, go to next item    |
//! | `quit` or `q` (or end of input)| stop; earlier answers are saved   |
//!
//! Numeric spellings such as `-1.0` or `+.5` are accepted when they equal a
//! scale point. Anything else re-prompts.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::ingest::{
    parse_annotations, write_annotations, write_atomic, AnnotationStore, Diagnostics, Warning,
};
use crate::model::{is_non_word_token, Annotation, PredictionSet};
use crate::valence::TemporalValence;

#[derive(Debug, Error)]
pub enum AnnotationError {
    #[error("prediction set of model {model:?} references unknown sentence {sentence:?}")]
    UnknownSentence { model: String, sentence: String },
    #[error("annotation store {0} is locked by another session")]
    Locked(PathBuf),
    #[error("annotation store {path}: {source}")]
    Invalid {
        path: PathBuf,
        #[source]
        source: Diagnostics,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// One (sentence, token) pair waiting for a sigma.
#[derive(Debug, Clone, PartialEq)]
pub struct QueueItem {
    pub sentence_id: String,
    pub sentence_text: String,
    pub token: String,
    /// Probability at the token's first occurrence among the inputs.
    pub probability: f64,
}

impl QueueItem {
    /// Sentence with the token in the mask slot, wrapped in `open`/`close`.
    pub fn highlighted(&self, open: &str, close: &str) -> String {
        let (before, after) = self
            .sentence_text
            .split_once(crate::model::MASK)
            .unwrap_or((&self.sentence_text, ""));
        format!("{before}{open}{}{close}{after}", self.token)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AnnotationQueue {
    pending: Vec<QueueItem>,
    /// Pairs among the inputs that were already annotated.
    pub done_count: usize,
}

impl AnnotationQueue {
    pub fn pending(&self) -> &[QueueItem] {
        &self.pending
    }

    pub fn len(&self) -> usize {
        self.pending.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pending.is_empty()
    }
}

/// Collects every predicted (sentence, token) pair that has no annotation.
///
/// Order: sentence id, then descending probability at the token's first
/// occurrence (inputs scanned in the order given), then token.
pub fn build_queue<'a>(
    testset: &crate::ingest::TestSetFile,
    sets: impl IntoIterator<Item = &'a PredictionSet>,
    store: &AnnotationStore,
) -> Result<AnnotationQueue, AnnotationError> {
    let mut first_seen: BTreeMap<(String, String), f64> = BTreeMap::new();
    for set in sets {
        if testset.get(set.sentence_id()).is_none() {
            return Err(AnnotationError::UnknownSentence {
                model: set.model_id().to_owned(),
                sentence: set.sentence_id().to_owned(),
            });
        }
        for p in set.predictions() {
            first_seen
                .entry((set.sentence_id().to_owned(), p.token().to_owned()))
                .or_insert(p.probability());
        }
    }
    let mut done_count = 0;
    let mut pending = Vec::new();
    for ((sentence_id, token), probability) in first_seen {
        if store.contains(&sentence_id, &token) {
            done_count += 1;
            continue;
        }
        let sentence_text = testset
            .get(&sentence_id)
            .expect("checked above")
            .text()
            .to_owned();
        pending.push(QueueItem {
            sentence_id,
            sentence_text,
            token,
            probability,
        });
    }
    pending.sort_by(|a, b| {
        a.sentence_id
            .cmp(&b.sentence_id)
            .then(b.probability.total_cmp(&a.probability))
            .then_with(|| a.token.cmp(&b.token))
    });
    Ok(AnnotationQueue {
        pending,
        done_count,
    })
}

#[derive(Debug, Clone, Default)]
pub struct SessionOptions {
    /// Show each candidate's model probability.
    pub reveal_probabilities: bool,
    /// Recorded on every new annotation.
    pub annotator: Option<String>,
    /// Use ANSI bold for the candidate token.
    pub color: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SessionSummary {
    pub answered: usize,
    pub skipped: usize,
    /// Items never shown because the session ended early.
    pub unvisited: usize,
    pub quit: bool,
}

/// Called with the whole store after every recorded answer.
pub trait Persist {
    fn persist(&mut self, store: &AnnotationStore) -> io::Result<()>;
}

impl<F: FnMut(&AnnotationStore) -> io::Result<()>> Persist for F {
    fn persist(&mut self, store: &AnnotationStore) -> io::Result<()> {
        self(store)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Response {
    Score(TemporalValence),
    Skip,
    Quit,
}

fn parse_response(line: &str) -> Option<Response> {
    match line.trim().to_ascii_lowercase().as_str() {
        "skip" | "s" => Some(Response::Skip),
        "quit" | "q" => Some(Response::Quit),
        other => other.parse().ok().map(Response::Score),
    }
}

const PROMPT: &str = "sigma [-1, -0.5, 0, 0.5, 1, skip, quit]> ";
const REMINDER: &str =
    "  answer one of: -1 (farthest past), -0.5, 0 (neutral), 0.5, 1 (present day), skip, quit";

/// Runs an interactive labeling session over `queue`.
///
/// Existing annotations are never overwritten; a pair that gained a sigma
/// since the queue was built is passed over. End of input counts as quit.
pub fn run_session<R: BufRead, W: Write>(
    queue: &AnnotationQueue,
    store: &mut AnnotationStore,
    mut input: R,
    mut output: W,
    persist: &mut impl Persist,
    options: &SessionOptions,
) -> io::Result<SessionSummary> {
    let mut summary = SessionSummary::default();
    let total = queue.len();
    let (open, close) = if options.color {
        ("\x1b[1m[", "]\x1b[0m")
    } else {
        ("[", "]")
    };
    let mut line = String::new();

    'items: for (i, item) in queue.pending().iter().enumerate() {
        if store.contains(&item.sentence_id, &item.token) {
            continue;
        }
        writeln!(output)?;
        writeln!(output, "[{}/{}] {}", i + 1, total, item.sentence_id)?;
        writeln!(output, "  {}", item.highlighted(open, close))?;
        let mut detail = format!("  token: {:?}", item.token);
        if is_non_word_token(&item.token) {
            detail.push_str("  (non-word token)");
        }
        if options.reveal_probabilities {
            detail.push_str(&format!("  p = {:.3}", item.probability));
        }
        writeln!(output, "{detail}")?;

        loop {
            write!(output, "{PROMPT}")?;
            output.flush()?;
            line.clear();
            if input.read_line(&mut line)? == 0 {
                writeln!(output)?;
                summary.quit = true;
                summary.unvisited = total - i;
                break 'items;
            }
            match parse_response(&line) {
                Some(Response::Score(sigma)) => {
                    let mut annotation = Annotation::new(&item.sentence_id, &item.token, sigma)
                        .expect("queue items have non-empty keys");
                    annotation.annotator = options.annotator.clone();
                    store
                        .insert(annotation)
                        .expect("pair checked absent before prompting");
                    persist.persist(store)?;
                    summary.answered += 1;
                    break;
                }
                Some(Response::Skip) => {
                    summary.skipped += 1;
                    break;
                }
                Some(Response::Quit) => {
                    summary.quit = true;
                    summary.unvisited = total - i;
                    break 'items;
                }
                None => {
                    writeln!(output, "  {:?} is not a valid answer", line.trim())?;
                    writeln!(output, "{REMINDER}")?;
                }
            }
        }
    }
    Ok(summary)
}

/// Reads an annotation store, or starts an empty one if `path` is absent.
pub fn load_store(path: &Path) -> Result<(AnnotationStore, Vec<Warning>), AnnotationError> {
    match std::fs::read(path) {
        Ok(bytes) => {
            let parsed = parse_annotations(&bytes).map_err(|source| AnnotationError::Invalid {
                path: path.to_owned(),
                source,
            })?;
            Ok((parsed.value, parsed.warnings))
        }
        Err(e) if e.kind() == io::ErrorKind::NotFound => Ok((AnnotationStore::default(), vec![])),
        Err(e) => Err(e.into()),
    }
}

/// Atomically replaces the file at `path` with `store`.
pub fn save_store(path: &Path, store: &AnnotationStore) -> io::Result<()> {
    write_atomic(path, write_annotations(store).as_bytes())
}

/// Exclusive lock on an annotation store, held through a `<store>.lock`
/// sidecar file for as long as the value lives.
#[derive(Debug)]
pub struct StoreLock {
    _file: File,
    path: PathBuf,
}

impl StoreLock {
    pub fn acquire(store_path: &Path) -> Result<Self, AnnotationError> {
        let mut name = store_path.as_os_str().to_owned();
        name.push(".lock");
        let path = PathBuf::from(name);
        let file = OpenOptions::new()
            .create(true)
            .truncate(false)
            .write(true)
            .open(&path)?;
        match file.try_lock() {
            Ok(()) => Ok(Self { _file: file, path }),
            Err(std::fs::TryLockError::WouldBlock) => {
                Err(AnnotationError::Locked(store_path.to_owned()))
            }
            Err(std::fs::TryLockError::Error(e)) => Err(e.into()),
        }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}
