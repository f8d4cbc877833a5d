use std::collections::BTreeMap;

use serde::Serialize;

use super::format::format_fixed;
use super::ReportError;
use crate::ingest::TestSetFile;
use crate::model::{ScoreRecord, ScoreRow};
use crate::valence::TemporalValence;

/// One model's block in a sentence table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelColumn {
    pub model_id: String,
    pub rows: Vec<ScoreRow>,
    pub beta: f64,
    pub delta: f64,
}

/// Scores of every model for one sentence, side by side.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SentenceTable {
    pub sentence_id: String,
    pub text: String,
    pub rho: TemporalValence,
    pub models: Vec<ModelColumn>,
}

/// Builds the table for one sentence. Columns keep the order of `records`.
pub fn render_sentence_table(
    records: &[&ScoreRecord],
    testset: &TestSetFile,
) -> Result<SentenceTable, ReportError> {
    let first = records.first().ok_or(ReportError::EmptyInput)?;
    if let Some(other) = records.iter().find(|r| r.sentence_id != first.sentence_id) {
        return Err(ReportError::MixedSentences(
            first.sentence_id.clone(),
            other.sentence_id.clone(),
        ));
    }
    let sentence = testset
        .get(&first.sentence_id)
        .ok_or_else(|| ReportError::UnknownSentence(first.sentence_id.clone()))?;
    Ok(SentenceTable {
        sentence_id: sentence.id().to_owned(),
        text: sentence.text().to_owned(),
        rho: sentence.rho(),
        models: records
            .iter()
            .map(|r| ModelColumn {
                model_id: r.model_id.clone(),
                rows: r.rows.clone(),
                beta: r.beta,
                delta: r.delta,
            })
            .collect(),
    })
}

/// One table per sentence, in test-set order; sentences without records
/// are left out.
pub fn render_all_tables(
    records: &[ScoreRecord],
    testset: &TestSetFile,
) -> Result<Vec<SentenceTable>, ReportError> {
    let mut by_sentence: BTreeMap<&str, Vec<&ScoreRecord>> = BTreeMap::new();
    for r in records {
        if testset.get(&r.sentence_id).is_none() {
            return Err(ReportError::UnknownSentence(r.sentence_id.clone()));
        }
        by_sentence.entry(&r.sentence_id).or_default().push(r);
    }
    testset
        .sentences()
        .filter_map(|s| by_sentence.get(s.id()))
        .map(|rs| render_sentence_table(rs, testset))
        .collect()
}

fn sigma_cell(sigma: TemporalValence) -> String {
    format!("{:.1}", sigma.value())
}

impl ModelColumn {
    fn block(&self, precision: usize, height: usize) -> Vec<String> {
        let token_w = self
            .rows
            .iter()
            .map(|r| r.token.chars().count())
            .max()
            .unwrap_or(0)
            .max(5);
        let num_w = precision + 3;
        let row = |a: &str, b: &str, c: &str| format!("{a:<token_w$} {b:>num_w$} {c:>5}");
        let mut lines = vec![self.model_id.clone(), row("token", "p", "sigma")];
        let rule = "-".repeat(lines[1].chars().count());
        lines.push(rule.clone());
        for r in &self.rows {
            let mut sigma = sigma_cell(r.sigma);
            if r.imputed {
                sigma.push('*');
            }
            lines.push(row(
                &r.token,
                &format_fixed(r.probability, precision),
                &sigma,
            ));
        }
        for _ in self.rows.len()..height {
            lines.push(String::new());
        }
        lines.push(rule);
        lines.push(row("beta", &format_fixed(self.beta, precision), ""));
        lines.push(row("delta", &format_fixed(self.delta, precision), ""));
        lines
    }
}

impl SentenceTable {
    /// Human-readable table with one block per model, side by side.
    pub fn to_text(&self, precision: usize) -> String {
        let height = self.models.iter().map(|m| m.rows.len()).max().unwrap_or(0);
        let blocks: Vec<Vec<String>> = self
            .models
            .iter()
            .map(|m| m.block(precision, height))
            .collect();
        let widths: Vec<usize> = blocks
            .iter()
            .map(|b| b.iter().map(|l| l.chars().count()).max().unwrap_or(0))
            .collect();

        let mut out = format!(
            "Scores for \"{}\" ({}, rho = {})\n\n",
            self.text, self.sentence_id, self.rho
        );
        let lines = blocks.first().map_or(0, Vec::len);
        for i in 0..lines {
            let cells: Vec<String> = blocks
                .iter()
                .zip(&widths)
                .map(|(b, &w)| format!("{:<w$}", b[i]))
                .collect();
            out.push_str(cells.join("   |   ").trim_end());
            out.push('\n');
        }
        if self.models.iter().any(|m| m.rows.iter().any(|r| r.imputed)) {
            out.push_str("\n* sigma not annotated, scored as neutral\n");
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tables serialize")
    }
}
