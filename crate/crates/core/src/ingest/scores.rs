use serde::Serialize;
use serde_json::Value;

use super::fields;
use super::{
    decode, lines, to_line, Diagnostics, IngestError, IngestErrorKind, Locator, Parsed, Warning,
    FORMAT_VERSION,
};
use crate::model::{ScoreRecord, ScoreRow};
use crate::scoring::{domain_adequacy, BETA_EPSILON};

pub const SCORES_FORMAT: &str = "diachron/scores";

/// Largest accepted gap between a stored delta and its recomputation.
const DELTA_ROUNDOFF: f64 = 1e-12;

#[derive(Serialize)]
struct HeaderOut {
    format: &'static str,
    format_version: u64,
}

/// Serializes score records as JSON Lines, header first.
pub fn write_scores(records: &[ScoreRecord]) -> String {
    let mut out = to_line(&HeaderOut {
        format: SCORES_FORMAT,
        format_version: FORMAT_VERSION,
    });
    out.push('\n');
    for r in records {
        out.push_str(&to_line(r));
        out.push('\n');
    }
    out
}

/// Reads a score export back, checking each delta against its beta and rho.
pub fn parse_scores(bytes: &[u8]) -> Result<Parsed<Vec<ScoreRecord>>, Diagnostics> {
    let text = decode(bytes)?;
    let mut errors = Vec::new();
    let mut warnings = Vec::new();
    let mut records = Vec::new();

    let mut rest = lines(text).peekable();
    match rest.next() {
        None => warnings.push(Warning {
            locator: Locator::File,
            message: "empty score file".into(),
        }),
        Some((n, line)) => {
            if let Err(kind) =
                fields::parse_object(line).and_then(|mut m| fields::header(&mut m, SCORES_FORMAT))
            {
                errors.push(IngestError::new(Locator::Line(n), kind));
            }
        }
    }
    for (n, line) in rest {
        match record(line) {
            Ok(r) => records.push(r),
            Err(kind) => errors.push(IngestError::new(Locator::Line(n), kind)),
        }
    }
    Diagnostics::check(errors)?;
    Ok(Parsed {
        value: records,
        warnings,
    })
}

fn record(line: &str) -> Result<ScoreRecord, IngestErrorKind> {
    let mut map = fields::parse_object(line)?;
    let model_id = fields::string(&mut map, "model_id")?;
    let sentence_id = fields::string(&mut map, "sentence_id")?;
    let rho = fields::valence(&mut map, "rho")?;
    let beta = fields::number(&mut map, "beta")?;
    let delta = fields::number(&mut map, "delta")?;
    let inconsistent = IngestErrorKind::InconsistentScore { beta, delta };
    if beta.abs() > 1.0 + BETA_EPSILON {
        return Err(inconsistent);
    }
    let expected = domain_adequacy(rho, beta).map_err(|_| inconsistent.clone())?;
    if (expected - delta).abs() > DELTA_ROUNDOFF {
        return Err(inconsistent);
    }
    let rows = match map.remove("rows") {
        Some(Value::Array(items)) => items.into_iter().map(row).collect::<Result<Vec<_>, _>>()?,
        Some(_) => {
            return Err(IngestErrorKind::WrongType {
                field: "rows",
                expected: "an array",
            })
        }
        None => return Err(IngestErrorKind::MissingField("rows")),
    };
    Ok(ScoreRecord {
        model_id,
        sentence_id,
        rho,
        beta,
        delta,
        rows,
    })
}

fn row(value: Value) -> Result<ScoreRow, IngestErrorKind> {
    let mut map = fields::object(value)?;
    let token = fields::string(&mut map, "token")?;
    let probability = fields::number(&mut map, "probability")?;
    if !(0.0..=1.0).contains(&probability) {
        return Err(crate::error::CoreError::ProbabilityOutOfRange { token, probability }.into());
    }
    let sigma = fields::valence(&mut map, "sigma")?;
    let imputed = match map.remove("imputed") {
        None | Some(Value::Null) => false,
        Some(Value::Bool(b)) => b,
        Some(_) => {
            return Err(IngestErrorKind::WrongType {
                field: "imputed",
                expected: "a boolean",
            })
        }
    };
    Ok(ScoreRow {
        token,
        probability,
        sigma,
        imputed,
    })
}
