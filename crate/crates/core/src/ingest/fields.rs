//! Typed extraction of known fields from a JSON object. Each helper removes
//! the field it reads, so whatever remains afterwards is the record's extra.

use serde_json::{Map, Value};

use super::{IngestErrorKind, FORMAT_VERSION};
use crate::valence::TemporalValence;

pub(super) type Fields = Map<String, Value>;

pub(super) fn object(value: Value) -> Result<Fields, IngestErrorKind> {
    match value {
        Value::Object(map) => Ok(map),
        _ => Err(IngestErrorKind::Syntax("expected a JSON object".into())),
    }
}

pub(super) fn parse_object(line: &str) -> Result<Fields, IngestErrorKind> {
    let value: Value =
        serde_json::from_str(line).map_err(|e| IngestErrorKind::Syntax(e.to_string()))?;
    object(value)
}

pub(super) fn opt_string(
    map: &mut Fields,
    field: &'static str,
) -> Result<Option<String>, IngestErrorKind> {
    match map.remove(field) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) => Ok(Some(s)),
        Some(_) => Err(IngestErrorKind::WrongType {
            field,
            expected: "a string",
        }),
    }
}

pub(super) fn string(map: &mut Fields, field: &'static str) -> Result<String, IngestErrorKind> {
    opt_string(map, field)?.ok_or(IngestErrorKind::MissingField(field))
}

pub(super) fn opt_u64(
    map: &mut Fields,
    field: &'static str,
) -> Result<Option<u64>, IngestErrorKind> {
    match map.remove(field) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::Number(n)) => n.as_u64().map(Some).ok_or(IngestErrorKind::WrongType {
            field,
            expected: "a non-negative integer",
        }),
        Some(_) => Err(IngestErrorKind::WrongType {
            field,
            expected: "a non-negative integer",
        }),
    }
}

/// A decimal given either as a JSON number or as a string.
pub(super) fn number_value(value: &Value, field: &'static str) -> Result<f64, IngestErrorKind> {
    let wrong = IngestErrorKind::WrongType {
        field,
        expected: "a decimal number",
    };
    match value {
        Value::Number(n) => n.as_f64().ok_or(wrong),
        Value::String(s) => {
            let s = s.trim();
            // Rust's float parser also takes "inf"/"NaN"; decimals only here.
            let decimal = !s.is_empty()
                && s.chars()
                    .all(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E'));
            if !decimal {
                return Err(wrong);
            }
            s.parse::<f64>().map_err(|_| wrong)
        }
        _ => Err(wrong),
    }
}

pub(super) fn number(map: &mut Fields, field: &'static str) -> Result<f64, IngestErrorKind> {
    let value = map
        .remove(field)
        .ok_or(IngestErrorKind::MissingField(field))?;
    number_value(&value, field)
}

pub(super) fn valence(
    map: &mut Fields,
    field: &'static str,
) -> Result<TemporalValence, IngestErrorKind> {
    let v = number(map, field)?;
    Ok(TemporalValence::from_number(v)?)
}

/// Checks and strips `format` / `format_version`.
pub(super) fn header(map: &mut Fields, expected: &'static str) -> Result<(), IngestErrorKind> {
    match map.remove("format") {
        Some(Value::String(found)) if found == expected => {}
        Some(Value::String(found)) => return Err(IngestErrorKind::WrongFormat { expected, found }),
        Some(other) => {
            return Err(IngestErrorKind::WrongFormat {
                expected,
                found: other.to_string(),
            })
        }
        None => return Err(IngestErrorKind::MissingHeader),
    }
    match opt_u64(map, "format_version")? {
        Some(FORMAT_VERSION) => Ok(()),
        Some(v) => Err(IngestErrorKind::UnsupportedVersion(v)),
        None => Err(IngestErrorKind::MissingField("format_version")),
    }
}
