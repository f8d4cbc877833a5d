//! Reference bias and domain adequacy values for the three sample sentences.

use std::path::PathBuf;

use diachron_core::ScoreRecord;

/// Reference values are given to three decimals.
pub const REFERENCE_TOLERANCE: f64 = 0.002;

pub struct Expected {
    pub model: &'static str,
    pub beta: f64,
    pub delta: f64,
}

pub struct Table {
    pub label: &'static str,
    pub sentence: &'static str,
    pub rows: [Expected; 3],
}

const fn e(model: &'static str, beta: f64, delta: f64) -> Expected {
    Expected { model, beta, delta }
}

pub const TABLES: [Table; 3] = [
    Table {
        label: "EME sample sentence (eme-01)",
        sentence: "eme-01",
        rows: [
            e("bert-base", -0.712, 0.856),
            e("macberth", -0.988, 0.994),
            e("english-hlm", -0.303, 0.652),
        ],
    },
    Table {
        label: "Neutral sample sentence (neutral-01)",
        sentence: "neutral-01",
        rows: [
            e("bert-base", 0.032, 0.984),
            e("macberth", -0.762, 0.619),
            e("english-hlm", 0.066, 0.967),
        ],
    },
    Table {
        label: "ME sample sentence (me-01)",
        sentence: "me-01",
        rows: [
            e("bert-base", 1.000, 1.000),
            e("macberth", 0.031, 0.516),
            e("english-hlm", 0.000, 0.500),
        ],
    },
];

pub fn sample_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/sample")
}

pub const PREDICTION_FILES: [&str; 3] = [
    "predictions-bert-base.jsonl",
    "predictions-macberth.jsonl",
    "predictions-english-hlm.jsonl",
];

/// Checks every model's beta and delta on the table's sentence.
pub fn compare(table: &Table, records: &[ScoreRecord]) -> Result<(), String> {
    for want in &table.rows {
        let got = records
            .iter()
            .find(|r| r.model_id == want.model && r.sentence_id == table.sentence)
            .ok_or_else(|| format!("no record for {} on {}", want.model, table.sentence))?;
        for (name, value, expected) in [
            ("beta", got.beta, want.beta),
            ("delta", got.delta, want.delta),
        ] {
            if (value - expected).abs() > REFERENCE_TOLERANCE {
                return Err(format!(
                    "{} {name} = {value}, expected {expected}",
                    want.model
                ));
            }
        }
    }
    Ok(())
}
