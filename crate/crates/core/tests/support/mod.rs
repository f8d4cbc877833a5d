//! Generators, an independent bias oracle and the property checks shared by
//! the integration tests and the acceptance runner.

#![allow(dead_code)]

use diachron_core::ingest::{
    parse_annotations, parse_predictions, parse_scores, parse_test_set, write_annotations,
    write_predictions, write_scores, write_test_set, AnnotationMeta, AnnotationStore, Entry, Extra,
    PredictionsFile, PredictionsMeta, TestSetFile, TestSetMeta,
};
use diachron_core::scoring::weighted_sigma;
use diachron_core::{
    bias, domain_adequacy, Annotation, MaskedSentence, MissingSigmaPolicy, Prediction,
    PredictionSet, ScoreRecord, TemporalValence, VarietyGroup, MASK,
};
use proptest::collection::{btree_set, vec};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use serde_json::Value;

pub const CASES: u32 = 1000;
pub const TOLERANCE: f64 = 1e-12;

pub fn runner() -> TestRunner {
    TestRunner::new(Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    })
}

/// Runs `test` over `CASES` values of `strategy`; the error carries the
/// minimal failing input.
pub fn check<S: Strategy>(
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    runner().run(&strategy, test).map_err(|e| e.to_string())
}

// ---- generators -----------------------------------------------------------

pub fn valence() -> impl Strategy<Value = TemporalValence> {
    prop::sample::select(TemporalValence::ALL.to_vec())
}

pub fn group() -> impl Strategy<Value = VarietyGroup> {
    prop::sample::select(VarietyGroup::ALL.to_vec())
}

pub fn id() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9-]{0,7}"
}

/// Any non-empty printable text, including quotes, `##` pieces and brackets.
pub fn token() -> impl Strategy<Value = String> {
    prop_oneof![
        4 => "\\PC{1,6}",
        1 => "##[a-z]{1,4}",
        1 => Just("[UNK]".to_owned()),
    ]
}

/// Probabilities with mass at most `max_mass`: random reals, or multiples
/// of 1/64 that sum exactly and produce ties.
pub fn probabilities(n: usize, max_mass: f64) -> impl Strategy<Value = Vec<f64>> {
    let real = (vec(0.0f64..1.0, n), 0.0..=max_mass).prop_map(|(w, mass)| {
        let total: f64 = w.iter().sum();
        w.iter()
            .map(|x| if total > 0.0 { x / total * mass } else { 0.0 })
            .collect::<Vec<_>>()
    });
    let budget = (64.0 * max_mass) as u32;
    let dyadic = vec(0u32..=budget, n).prop_map(move |k| {
        let mut left = budget;
        k.into_iter()
            .map(|k| {
                let k = k.min(left);
                left -= k;
                f64::from(k) / 64.0
            })
            .collect::<Vec<_>>()
    });
    prop_oneof![real, dyadic]
}

/// A prediction row set paired with a sigma per token, for one sentence.
#[derive(Debug, Clone)]
pub struct Case {
    pub rho: TemporalValence,
    pub rows: Vec<(String, f64, TemporalValence)>,
}

impl Case {
    pub fn set(&self) -> PredictionSet {
        let rows = self
            .rows
            .iter()
            .map(|(t, p, _)| Prediction::new(t.clone(), *p).unwrap())
            .collect();
        PredictionSet::new("m", "s", rows).unwrap()
    }

    pub fn annotations(&self) -> Vec<Annotation> {
        self.rows
            .iter()
            .map(|(t, _, s)| Annotation::new("s", t.clone(), *s).unwrap())
            .collect()
    }

    pub fn store(&self) -> AnnotationStore {
        AnnotationStore::from_annotations(self.annotations()).unwrap()
    }

    pub fn beta(&self) -> f64 {
        bias(&self.set(), &self.store(), MissingSigmaPolicy::Strict)
            .unwrap()
            .value
    }

    pub fn mass(&self) -> f64 {
        self.rows.iter().map(|r| r.1).sum()
    }
}

pub fn case_with_mass(max_mass: f64) -> impl Strategy<Value = Case> {
    (valence(), btree_set(token(), 1..=8))
        .prop_flat_map(move |(rho, tokens)| {
            let n = tokens.len();
            (
                Just(rho),
                Just(tokens),
                probabilities(n, max_mass),
                vec(valence(), n),
            )
        })
        .prop_map(|(rho, tokens, ps, sigmas)| Case {
            rho,
            rows: tokens
                .into_iter()
                .zip(ps)
                .zip(sigmas)
                .map(|((t, p), s)| (t, p, s))
                .collect(),
        })
}

pub fn case() -> impl Strategy<Value = Case> {
    case_with_mass(1.0)
}

/// Cases whose bias is exactly rho: every sigma equals rho and the mass is 1.
pub fn on_target_case() -> impl Strategy<Value = Case> {
    (valence(), 1u32..=6).prop_map(|(rho, n)| {
        let mut rows: Vec<_> = (1..n)
            .map(|i| (format!("t{i}"), 1.0 / f64::from(1u32 << i), rho))
            .collect();
        rows.push(("rest".into(), 1.0 / f64::from(1u32 << (n - 1)), rho));
        Case { rho, rows }
    })
}

// ---- oracle -----------------------------------------------------------------

/// Bias by brute force: every prediction row is matched against the full
/// annotation list by linear scan, and sigma is rebuilt from its half-steps.
pub fn oracle_beta(rows: &[(String, f64)], annotations: &[Annotation]) -> f64 {
    let mut sum = 0.0;
    for (token, p) in rows {
        let mut sigma = None;
        for a in annotations {
            if a.sentence_id == "s" && &a.token == token {
                sigma = Some(f64::from(a.sigma.halves()) / 2.0);
            }
        }
        sum += p * sigma.expect("every row is annotated");
    }
    sum
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOLERANCE
}

// ---- scoring properties ---------------------------------------------------

pub fn beta_bounded_by_mass() -> Result<(), String> {
    check(case(), |c| {
        let beta = c.beta();
        prop_assert!(
            beta.abs() <= c.mass() + TOLERANCE,
            "beta {beta} mass {}",
            c.mass()
        );
        Ok(())
    })
}

pub fn delta_in_unit_interval() -> Result<(), String> {
    check(case(), |c| {
        let delta = domain_adequacy(c.rho, c.beta()).unwrap();
        prop_assert!((0.0..=1.0).contains(&delta), "delta {delta}");
        Ok(())
    })
}

pub fn delta_one_iff_beta_equals_rho() -> Result<(), String> {
    let cases = prop_oneof![case(), on_target_case()];
    check((cases, valence()), |(c, other_rho)| {
        let beta = c.beta();
        for rho in [c.rho, other_rho] {
            let delta = domain_adequacy(rho, beta).unwrap();
            prop_assert_eq!(
                delta == 1.0,
                beta == rho.value(),
                "rho {} beta {}",
                rho,
                beta
            );
        }
        Ok(())
    })
}

pub fn beta_permutation_invariant() -> Result<(), String> {
    let strategy = case().prop_flat_map(|c| {
        let shuffled = Just(c.rows.clone()).prop_shuffle();
        (Just(c), shuffled)
    });
    check(strategy, |(c, shuffled)| {
        let permuted = Case {
            rho: c.rho,
            rows: shuffled,
        };
        prop_assert_eq!(c.beta(), permuted.beta());
        let rows = bias(&c.set(), &c.store(), MissingSigmaPolicy::Strict)
            .unwrap()
            .rows;
        let mut reversed = rows.clone();
        reversed.reverse();
        prop_assert!(close(weighted_sigma(&rows), weighted_sigma(&reversed)));
        Ok(())
    })
}

pub fn beta_linear_in_probability() -> Result<(), String> {
    let strategy = case_with_mass(0.5).prop_flat_map(|c| {
        let n = c.rows.len();
        (Just(c), probabilities(n, 0.5), 0.0f64..=1.0)
    });
    check(strategy, |(c, q, scale)| {
        let with = |ps: Vec<f64>| Case {
            rho: c.rho,
            rows: c
                .rows
                .iter()
                .zip(ps)
                .map(|((t, _, s), p)| (t.clone(), p, *s))
                .collect(),
        };
        let p: Vec<f64> = c.rows.iter().map(|r| r.1).collect();
        let sum: Vec<f64> = p.iter().zip(&q).map(|(a, b)| a + b).collect();
        let scaled: Vec<f64> = p.iter().map(|a| a * scale).collect();
        let (bp, bq) = (c.beta(), with(q).beta());
        prop_assert!(close(with(sum).beta(), bp + bq));
        prop_assert!(close(with(scaled).beta(), scale * bp));
        Ok(())
    })
}

pub fn single_step_shift() -> Result<(), String> {
    let strategy = case().prop_flat_map(|c| {
        let n = c.rows.len();
        (Just(c), 0..n, any::<bool>())
    });
    check(strategy, |(c, i, up)| {
        let (_, p, sigma) = c.rows[i].clone();
        let shifted = if up {
            sigma.step_up()
        } else {
            sigma.step_down()
        };
        let Some(shifted) = shifted else {
            return Ok(());
        };
        let mut moved = c.clone();
        moved.rows[i].2 = shifted;
        let expected = if up { 0.5 * p } else { -0.5 * p };
        let change = moved.beta() - c.beta();
        prop_assert!(
            close(change, expected),
            "change {change}, expected {expected}"
        );
        Ok(())
    })
}

pub fn beta_matches_oracle() -> Result<(), String> {
    check(case(), |c| {
        let rows: Vec<(String, f64)> = c.rows.iter().map(|(t, p, _)| (t.clone(), *p)).collect();
        let mut annotations = c.annotations();
        // decoys on other sentences must never be matched
        annotations.extend(c.rows.iter().map(|(t, _, _)| {
            Annotation::new("other", t.clone(), TemporalValence::PRESENT).unwrap()
        }));
        let oracle = oracle_beta(&rows, &annotations);
        prop_assert!(close(c.beta(), oracle), "beta {} oracle {oracle}", c.beta());
        Ok(())
    })
}

pub type Check = (&'static str, fn() -> Result<(), String>);

pub const PROPERTIES: [Check; 7] = [
    ("|beta| <= sum of probabilities", beta_bounded_by_mass),
    ("delta within [0, 1]", delta_in_unit_interval),
    ("delta = 1 iff beta = rho", delta_one_iff_beta_equals_rho),
    (
        "beta invariant under row permutation",
        beta_permutation_invariant,
    ),
    ("beta linear in probabilities", beta_linear_in_probability),
    ("one sigma step moves beta by 0.5 p", single_step_shift),
    ("beta equals brute-force oracle", beta_matches_oracle),
];

// ---- file generators ------------------------------------------------------

fn extra_value() -> impl Strategy<Value = Value> {
    let leaf = prop_oneof![
        Just(Value::Null),
        any::<bool>().prop_map(Value::from),
        any::<i64>().prop_map(Value::from),
        (-1e6f64..1e6).prop_map(Value::from),
        "\\PC{0,8}".prop_map(Value::from),
    ];
    leaf.prop_recursive(2, 8, 3, |inner| {
        prop_oneof![
            vec(inner.clone(), 0..3).prop_map(Value::from),
            prop::collection::btree_map("[a-z]{1,3}", inner, 0..3)
                .prop_map(|m| Value::Object(m.into_iter().collect())),
        ]
    })
}

/// Unknown fields; the `x-` prefix keeps them clear of reserved names.
pub fn extra() -> impl Strategy<Value = Extra> {
    prop::collection::btree_map("x-[a-z]{1,5}", extra_value(), 0..3)
        .prop_map(|m| m.into_iter().collect())
}

fn text_part() -> impl Strategy<Value = String> {
    "\\PC{0,12}".prop_filter("no mask marker", |s| {
        !s.contains(MASK) && !s.contains("[MASK")
    })
}

fn sentence(id: String) -> impl Strategy<Value = MaskedSentence> {
    (
        "[A-Za-z]",
        text_part(),
        text_part().prop_filter("no marker tail", |s| !s.starts_with("MASK]")),
        valence(),
        group(),
    )
        .prop_filter_map(
            "valid sentence",
            move |(lead, before, after, rho, group)| {
                let text = format!("{lead}{before}{MASK}{after}");
                MaskedSentence::new(id.clone(), text, rho, group).ok()
            },
        )
}

pub fn testset_file() -> impl Strategy<Value = TestSetFile> {
    (
        proptest::option::of("\\PC{0,10}"),
        proptest::option::of("[0-9]\\.[0-9]"),
        extra(),
        btree_set(id(), 0..6),
    )
        .prop_flat_map(|(name, version, meta_extra, ids)| {
            let sentences: Vec<_> = ids
                .into_iter()
                .map(|id| (sentence(id), extra()).prop_map(|(s, e)| Entry::with_extra(s, e)))
                .collect();
            (Just(name), Just(version), Just(meta_extra), sentences)
        })
        .prop_map(|(name, version, extra, sentences)| {
            let meta = TestSetMeta {
                name,
                version,
                extra,
            };
            TestSetFile::new(meta, sentences).unwrap()
        })
}

fn prediction_set(model: String, sentence: String) -> impl Strategy<Value = PredictionSet> {
    btree_set(token(), 1..=8)
        .prop_flat_map(|tokens| {
            let n = tokens.len();
            (Just(tokens), probabilities(n, 1.0))
        })
        .prop_map(move |(tokens, ps)| {
            let rows = tokens
                .into_iter()
                .zip(ps)
                .map(|(t, p)| Prediction::new(t, p).unwrap())
                .collect();
            PredictionSet::new(model.clone(), sentence.clone(), rows).unwrap()
        })
}

pub fn predictions_file() -> impl Strategy<Value = PredictionsFile> {
    let meta = (
        proptest::option::of(id()),
        proptest::option::of("[0-9]\\.[0-9]\\.[0-9]"),
        proptest::option::of(8u64..12),
        proptest::option::of("2026-0[1-9]-[12][0-9]T[01][0-9]:00:00Z"),
        proptest::option::of(1u32..8),
        extra(),
    )
        .prop_map(
            |(model_id, adapter_version, top_n, timestamp, probability_decimals, extra)| {
                PredictionsMeta {
                    model_id,
                    adapter_version,
                    top_n,
                    timestamp,
                    probability_decimals,
                    extra,
                }
            },
        );
    (meta, btree_set((id(), id()), 0..6))
        .prop_flat_map(|(meta, pairs)| {
            let sets: Vec<_> = pairs
                .into_iter()
                .map(|(m, s)| {
                    (prediction_set(m, s), extra()).prop_map(|(p, e)| Entry::with_extra(p, e))
                })
                .collect();
            (Just(meta), sets)
        })
        .prop_map(|(meta, sets)| PredictionsFile::new(meta, sets).unwrap())
}

pub fn annotation_store() -> impl Strategy<Value = AnnotationStore> {
    let annotator = proptest::option::of(prop::sample::select(vec!["ann", "bo", "Zoë"]));
    let record = (
        valence(),
        annotator,
        proptest::option::of("\\PC{0,12}"),
        extra(),
    );
    let meta = (
        proptest::option::of("\\PC{0,20}"),
        vec(prop::sample::select(vec!["ann", "cy"]), 0..2),
        extra(),
    );
    (
        meta,
        prop::collection::btree_map((id(), token()), record, 0..12),
    )
        .prop_map(|((scale, mut annotators, extra), records)| {
            annotators.dedup();
            let mut store = AnnotationStore::new(AnnotationMeta {
                scale,
                annotators: annotators.into_iter().map(str::to_owned).collect(),
                extra,
            });
            for ((sentence, token), (sigma, who, note, extra)) in records {
                let mut a = Annotation::new(sentence, token, sigma).unwrap();
                a.annotator = who.map(str::to_owned);
                a.note = note;
                store.insert_entry(Entry::with_extra(a, extra)).unwrap();
            }
            store
        })
}

pub fn score_records() -> impl Strategy<Value = Vec<ScoreRecord>> {
    vec((id(), case()), 0..6).prop_map(|cases| {
        cases
            .into_iter()
            .map(|(model, c)| {
                let b = bias(&c.set(), &c.store(), MissingSigmaPolicy::Strict).unwrap();
                ScoreRecord {
                    model_id: model,
                    sentence_id: "s".into(),
                    rho: c.rho,
                    beta: b.value,
                    delta: domain_adequacy(c.rho, b.value).unwrap(),
                    rows: b.rows,
                }
            })
            .collect()
    })
}

// ---- round trips and fuzzing ----------------------------------------------

/// parse(write(x)) == x, and writing the parsed value again is byte-identical.
fn round_trip<T: PartialEq + std::fmt::Debug, E: std::fmt::Debug>(
    value: &T,
    write: impl Fn(&T) -> String,
    parse: impl Fn(&[u8]) -> Result<diachron_core::ingest::Parsed<T>, E>,
) -> Result<(), TestCaseError> {
    let text = write(value);
    let parsed =
        parse(text.as_bytes()).map_err(|e| TestCaseError::fail(format!("{e:?} for\n{text}")))?;
    prop_assert_eq!(&parsed.value, value);
    prop_assert_eq!(write(&parsed.value), text);
    Ok(())
}

pub fn testset_round_trip() -> Result<(), String> {
    check(testset_file(), |f| {
        round_trip(&f, write_test_set, parse_test_set)
    })
}

pub fn predictions_round_trip() -> Result<(), String> {
    check(predictions_file(), |f| {
        round_trip(&f, write_predictions, parse_predictions)
    })
}

pub fn annotations_round_trip() -> Result<(), String> {
    check(annotation_store(), |s| {
        round_trip(&s, write_annotations, parse_annotations)
    })
}

pub fn scores_round_trip() -> Result<(), String> {
    check(score_records(), |r| {
        round_trip(&r, |r| write_scores(r), parse_scores)
    })
}

/// Arbitrary bytes, and valid files with bytes flipped, cut or spliced in.
fn fuzzed(valid: impl Strategy<Value = String>) -> impl Strategy<Value = Vec<u8>> {
    let mutated = (
        valid,
        vec((any::<prop::sample::Index>(), any::<u8>()), 0..4),
        any::<prop::sample::Index>(),
    )
        .prop_map(|(text, edits, cut)| {
            let mut bytes = text.into_bytes();
            for (at, b) in edits {
                if !bytes.is_empty() {
                    let i = at.index(bytes.len());
                    bytes[i] = b;
                }
            }
            if !bytes.is_empty() {
                bytes.truncate(cut.index(bytes.len() + 1).max(1));
            }
            bytes
        });
    prop_oneof![vec(any::<u8>(), 0..256), mutated]
}

pub fn parsers_survive_fuzzing() -> Result<(), String> {
    check(
        fuzzed(testset_file().prop_map(|f| write_test_set(&f))),
        |b| {
            let _ = parse_test_set(&b);
            Ok(())
        },
    )?;
    check(
        fuzzed(predictions_file().prop_map(|f| write_predictions(&f))),
        |b| {
            let _ = parse_predictions(&b);
            Ok(())
        },
    )?;
    check(
        fuzzed(annotation_store().prop_map(|s| write_annotations(&s))),
        |b| {
            let _ = parse_annotations(&b);
            Ok(())
        },
    )?;
    check(
        fuzzed(score_records().prop_map(|r| write_scores(&r))),
        |b| {
            let _ = parse_scores(&b);
            Ok(())
        },
    )
}

pub const ROUND_TRIPS: [Check; 5] = [
    ("test set parse/write identity", testset_round_trip),
    ("predictions parse/write identity", predictions_round_trip),
    ("annotations parse/write identity", annotations_round_trip),
    ("scores parse/write identity", scores_round_trip),
    (
        "parsers never abort on fuzzed bytes",
        parsers_survive_fuzzing,
    ),
];

pub mod reference;
pub mod scenarios;
