//! End-to-end library scenarios: resuming an interrupted annotation session
//! and the shape of the distribution report.

use std::path::Path;

use diachron_core::annotation::{build_queue, load_store, run_session, save_store, SessionOptions};
use diachron_core::ingest::{
    parse_predictions, parse_test_set, AnnotationStore, PredictionsFile, TestSetFile,
};
use diachron_core::report::{render_distribution, SUMMARY_COLUMNS};
use diachron_core::{
    domain_adequacy, summarize, MaskedSentence, PredictionSet, ScoreRecord, TemporalValence,
    VarietyGroup,
};

use super::reference::{sample_dir, PREDICTION_FILES};

pub fn sample_testset() -> TestSetFile {
    let bytes = std::fs::read(sample_dir().join("testset.json")).unwrap();
    parse_test_set(&bytes).unwrap().value
}

pub fn sample_sets() -> Vec<PredictionSet> {
    PREDICTION_FILES
        .iter()
        .flat_map(|name| {
            let bytes = std::fs::read(sample_dir().join(name)).unwrap();
            let file: PredictionsFile = parse_predictions(&bytes).unwrap().value;
            file.sets().cloned().collect::<Vec<_>>()
        })
        .collect()
}

/// Answers `k` items of a fresh queue over the sample predictions, ends the
/// session mid-queue, and checks what a new queue built from disk holds.
pub fn resume_after(k: usize, store_path: &Path) -> Result<(), String> {
    let testset = sample_testset();
    let sets = sample_sets();
    let initial = build_queue(&testset, &sets, &AnnotationStore::default())
        .map_err(|e| e.to_string())?
        .len();
    let k = k.min(initial);

    let (mut store, _) = load_store(store_path).map_err(|e| e.to_string())?;
    let queue = build_queue(&testset, &sets, &store).map_err(|e| e.to_string())?;
    let answers = "0\n".repeat(k);
    let mut persist = |s: &AnnotationStore| save_store(store_path, s);
    let summary = run_session(
        &queue,
        &mut store,
        answers.as_bytes(),
        std::io::sink(),
        &mut persist,
        &SessionOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    if summary.answered != k {
        return Err(format!("answered {} of {k}", summary.answered));
    }

    let (reloaded, _) = load_store(store_path).map_err(|e| e.to_string())?;
    if reloaded.len() != k {
        return Err(format!(
            "store holds {} records after {k} answers",
            reloaded.len()
        ));
    }
    let pending = build_queue(&testset, &sets, &reloaded)
        .map_err(|e| e.to_string())?
        .len();
    if pending != initial - k {
        return Err(format!(
            "{pending} pending after {k} answers, expected {}",
            initial - k
        ));
    }
    Ok(())
}

pub const PER_GROUP: usize = 20;

/// Bias of model `m` on the `k`-th sentence of any group.
fn synthetic_beta(m: usize, k: usize) -> f64 {
    let x = k as f64 / 20.0;
    match m {
        0 => x,
        1 => -x,
        _ => x * x,
    }
}

const MODELS: [&str; 3] = ["model-a", "model-b", "model-c"];

pub fn synthetic(
    values: impl Fn(usize, usize) -> f64,
    per_group: usize,
) -> (TestSetFile, Vec<ScoreRecord>) {
    let mut sentences = Vec::new();
    let mut records = Vec::new();
    for group in VarietyGroup::ALL {
        let rho = match group {
            VarietyGroup::Eme => TemporalValence::FARTHEST,
            VarietyGroup::Neutral => TemporalValence::NEUTRAL,
            VarietyGroup::Me => TemporalValence::PRESENT,
        };
        for k in 0..per_group {
            let id = format!("{group}-{k:02}").to_lowercase();
            sentences.push(MaskedSentence::new(&id, "A [MASK] here.", rho, group).unwrap());
            for (m, model) in MODELS.iter().enumerate() {
                let beta = values(m, k);
                records.push(ScoreRecord {
                    model_id: (*model).into(),
                    sentence_id: id.clone(),
                    rho,
                    beta,
                    delta: domain_adequacy(rho, beta).unwrap(),
                    rows: vec![],
                });
            }
        }
    }
    (TestSetFile::from_sentences(sentences).unwrap(), records)
}

/// (model, group, metric, [min, q1, median, q3, max, mean]) worked out by
/// hand for the values k/20, -k/20 and (k/20)^2 with k = 0..19: the lower
/// half is k = 0..9, so q1 averages k = 4 and 5, the median k = 9 and 10,
/// q3 k = 14 and 15.
const TWENTY: [(&str, &str, &str, [f64; 6]); 4] = [
    (
        "model-a",
        "ME",
        "beta",
        [0.0, 0.225, 0.475, 0.725, 0.95, 0.475],
    ),
    (
        "model-b",
        "EME",
        "beta",
        [-0.95, -0.725, -0.475, -0.225, 0.0, -0.475],
    ),
    (
        "model-c",
        "Neutral",
        "beta",
        [0.0, 0.05125, 0.22625, 0.52625, 0.9025, 0.30875],
    ),
    // delta = 0.5 + beta / 2 under rho = 1
    (
        "model-a",
        "ME",
        "delta",
        [0.5, 0.6125, 0.7375, 0.8625, 0.975, 0.7375],
    ),
];

/// Five values 0.1..0.5: the median 0.3 sits in neither half.
const FIVE: (&str, &str, &str, [f64; 6]) =
    ("model-a", "EME", "beta", [0.1, 0.15, 0.3, 0.45, 0.5, 0.3]);

fn check_row(table: &str, want: &(&str, &str, &str, [f64; 6]), count: usize) -> Result<(), String> {
    let (model, group, metric, stats) = want;
    let row: Vec<&str> = table
        .lines()
        .map(|l| l.split('\t').collect::<Vec<_>>())
        .find(|c| c[0] == *model && c[1] == *group && c[2] == *metric)
        .ok_or_else(|| format!("no summary row for {model}/{group}/{metric}"))?;
    if row[3] != count.to_string() {
        return Err(format!(
            "{model}/{group}/{metric}: count {} not {count}",
            row[3]
        ));
    }
    for (i, expected) in stats.iter().enumerate() {
        let got: f64 = row[4 + i].parse().map_err(|e| format!("{e}"))?;
        if (got - expected).abs() > 1e-12 {
            return Err(format!(
                "{model}/{group}/{metric} {} = {got}, hand-computed {expected}",
                SUMMARY_COLUMNS[4 + i]
            ));
        }
    }
    Ok(())
}

fn panels(svg: &str) -> Vec<&str> {
    svg.split(r#"<g class="panel""#).skip(1).collect()
}

pub fn distribution_shape() -> Result<(), String> {
    let (testset, records) = synthetic(synthetic_beta, PER_GROUP);
    let summaries = summarize(&records, &testset).map_err(|e| e.to_string())?;
    let report = render_distribution(&summaries, &records, &testset).map_err(|e| e.to_string())?;

    for (name, svg) in [("beta", &report.beta_svg), ("delta", &report.delta_svg)] {
        let panels = panels(svg);
        if panels.len() != 3 {
            return Err(format!("{name} graphic has {} panels", panels.len()));
        }
        for p in &panels {
            let boxes = p.matches(r#"<g class="box""#).count();
            if boxes != 3 {
                return Err(format!("{name} panel has {boxes} boxes"));
            }
            if p.matches(&format!(r#"data-count="{PER_GROUP}""#)).count() != 3 {
                return Err(format!(
                    "{name} panel boxes do not each hold {PER_GROUP} values"
                ));
            }
        }
    }

    let header = report.table.lines().next().unwrap_or_default();
    if header != SUMMARY_COLUMNS.join("\t") {
        return Err(format!("summary header {header:?}"));
    }
    if report.table.lines().count() != 1 + 3 * 3 * 2 {
        return Err(format!("{} summary lines", report.table.lines().count()));
    }
    for want in &TWENTY {
        check_row(&report.table, want, PER_GROUP)?;
    }

    let (testset, records) = synthetic(|_, k| (k + 1) as f64 / 10.0, 5);
    let summaries = summarize(&records, &testset).map_err(|e| e.to_string())?;
    let report = render_distribution(&summaries, &records, &testset).map_err(|e| e.to_string())?;
    check_row(&report.table, &FIVE, 5)
}
