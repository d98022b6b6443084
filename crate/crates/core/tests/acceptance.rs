//! Runs each acceptance criterion and prints one PASS/FAIL line per item.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::trees::*;
use common::*;
use cpa_core::corpus::{parse_corpus, SentencePrediction, Split};
use cpa_core::eval::{score, Counts, EvalReport, ScoreOptions, VerbScores};
use cpa_core::features::{extract, FeatureName, FeatureVector};
use cpa_core::maxent::{train, LabeledExample, MaxentModel, Objective, TrainConfig};
use cpa_core::pipeline::{annotate_all, train_pipeline};
use cpa_core::resources::{build_verb_prep_table, HypernymLexicon, Resources, VerbPrepTable};
use cpa_core::selection::{select_features, SelectionOptions};
use cpa_core::trees::{ConstTree, Direction};
use cpa_core::features::Stage;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(t: Duration, limit: Duration) -> Result<(), String> {
    ensure(t < limit, format!("took {t:?}, limit {limit:?}"))
}

fn c1_scorer_aggregation() -> Outcome {
    let start = Instant::now();
    let verbs = TABLE8
        .iter()
        .map(|(verb, row)| {
            let (c, r, n) = contrived_counts(row[0], row[1], 100_000);
            let (c2, r2, n2) = contrived_counts(row[3], row[4], 100_000);
            VerbScores::<f64>::from_counts(*verb, Counts::new(c, r, n), Counts::new(c2, r2, n2))
        })
        .collect();
    let report = EvalReport::from_verbs(verbs);
    let mut worst: f64 = 0.0;
    for (verb, row) in TABLE8 {
        let v = report.verb(verb).ok_or(format!("missing {verb}"))?;
        for (g, want) in [v.avg.precision, v.avg.recall, v.avg.f1].iter().zip(&row[6..]) {
            worst = worst.max((g - want).abs());
        }
    }
    ensure(worst <= 1e-3 + 1e-12, format!("avg column off by {worst:.5}"))?;
    let off = (report.overall - 0.661).abs();
    ensure(off <= 1e-3, format!("overall {:.5}", report.overall))?;
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("max avg deviation {worst:.5}, overall {:.4}", report.overall))
}

fn c2_hand_count() -> Outcome {
    let (gold, preds) = handmade_scoring_case();
    let report = score::<f64>(&gold, &preds, ScoreOptions::default()).map_err(|e| e.to_string())?;
    let sum = |f: &dyn Fn(&VerbScores<f64>) -> Counts| {
        report.verbs.iter().map(f).fold((0, 0, 0), |a, c| (a.0 + c.correct, a.1 + c.retrieved, a.2 + c.reference))
    };
    let syn = sum(&|v| v.syn.counts());
    let sem = sum(&|v| v.sem.counts());
    ensure(syn == brute_force_tally(&gold, &preds, |a| a.syn.to_string()), "syn tally differs")?;
    ensure(sem == brute_force_tally(&gold, &preds, |a| a.sem.to_string()), "sem tally differs")?;
    ensure(syn == (2, 3, 4) && sem == (2, 3, 4), format!("counts {syn:?} {sem:?}"))?;
    let stats = cpa_core::eval::LayerStats::<f64>::from_counts(syn.0, syn.1, syn.2);
    ensure(stats.precision == 2.0 / 3.0 && stats.recall == 0.5 && stats.f1 == 4.0 / 7.0, "P/R/F mismatch")?;
    Ok("P = 2/3, R = 1/2, F1 = 4/7".into())
}

fn random_examples(rng: &mut ChaCha8Rng) -> Vec<LabeledExample<f64>> {
    (0..5)
        .map(|k| {
            let mut v = FeatureVector::new();
            for f in ["a", "b", "c"] {
                if rng.random_bool(0.5) {
                    v.indicators.insert(f.to_string());
                }
            }
            v.reals.insert("r".into(), rng.random_range(-2.0..2.0));
            LabeledExample::new(v, format!("c{}", k % 3))
        })
        .collect()
}

fn c3_gradient() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for seed in 0..5 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let obj = Objective::new(&random_examples(&mut rng), 1.0).map_err(|e| e.to_string())?;
        let w: Vec<f64> = (0..obj.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let g = obj.gradient(&w);
        for k in 0..w.len() {
            let (mut p, mut m) = (w.clone(), w.clone());
            p[k] += 1e-5;
            m[k] -= 1e-5;
            let fd = (obj.value(&p) - obj.value(&m)) / 2e-5;
            worst = worst.max((g[k] - fd).abs() / g[k].abs().max(fd.abs()).max(1e-6));
        }
    }
    ensure(worst < 1e-4, format!("max relative error {worst:e}"))?;
    within(start.elapsed(), Duration::from_secs(5))?;
    Ok(format!("max relative error {worst:.2e}"))
}

fn model_with(classes: usize, rng: &mut ChaCha8Rng, edit: impl Fn(&str, f64) -> f64) -> MaxentModel<f64> {
    let names: Vec<String> = (0..classes).map(|c| format!("k{c}")).collect();
    let weights = ["<bias>", "a", "r"]
        .iter()
        .map(|f| {
            let row = names.iter().map(|c| (c.clone(), edit(f, rng.random_range(-20.0..20.0)))).collect();
            (f.to_string(), row)
        })
        .collect::<BTreeMap<String, BTreeMap<String, f64>>>();
    MaxentModel::from_weights(names, weights, 1.0).unwrap()
}

fn c4_normalization() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..500u64 {
        let classes = 2 + (seed % 5) as usize;
        let shift = (seed as f64) - 250.0;
        let k = 0.01 + (seed as f64) / 5.0;
        let r = ((seed * 7) % 13) as f64 - 6.0;
        let x = |scale: f64| {
            let mut v = FeatureVector::new();
            v.indicators.insert("a".into());
            v.reals.insert("r".into(), r * scale);
            v
        };
        let base = model_with(classes, &mut ChaCha8Rng::seed_from_u64(seed), |_, w| w);
        let shifted = model_with(classes, &mut ChaCha8Rng::seed_from_u64(seed), |f, w| if f == "<bias>" { w + shift } else { w });
        let scaled = model_with(classes, &mut ChaCha8Rng::seed_from_u64(seed), |f, w| if f == "r" { w / k } else { w });
        let p = base.probabilities(&x(1.0));
        worst = worst.max((p.iter().sum::<f64>() - 1.0).abs());
        for (a, b) in p.iter().zip(shifted.probabilities(&x(1.0))) {
            ensure((a - b).abs() < 1e-9, format!("shift invariance, seed {seed}"))?;
        }
        for (a, b) in p.iter().zip(scaled.probabilities(&x(k))) {
            ensure((a - b).abs() < 1e-9, format!("scale invariance, seed {seed}"))?;
        }
    }
    ensure(worst < 1e-9, format!("sum deviates by {worst:e}"))?;
    Ok(format!("500 random models, max |sum - 1| = {worst:.1e}"))
}

fn c5_separable() -> Outcome {
    let data: Vec<LabeledExample<f64>> = (0..10)
        .map(|k| {
            let mut v = FeatureVector::new();
            v.indicators.insert(if k % 2 == 0 { "cue=yes" } else { "cue=no" }.into());
            v.indicators.insert(format!("noise={}", k % 3));
            LabeledExample::new(v, if k % 2 == 0 { "A" } else { "B" })
        })
        .collect();
    let cfg = TrainConfig { max_iterations: 200, ..TrainConfig::default() };
    let m = train(&data, &cfg).map_err(|e| e.to_string())?;
    let acc = data.iter().filter(|e| m.predict(&e.features) == e.label).count();
    ensure(acc == 10, format!("training accuracy {acc}/10"))?;
    let again = train(&data, &cfg).map_err(|e| e.to_string())?;
    ensure(again.to_text() == m.to_text(), "retraining changed the weight file")?;
    Ok(format!("accuracy 1.0 after {} iterations, bitwise reproducible", m.info().iterations))
}

fn c6_feature_fixture() -> Outcome {
    let d = parse_corpus(include_str!("../fixtures/walkthrough.conll"), Split::Train).map_err(|e| e.to_string())?;
    let lex = HypernymLexicon::parse(include_str!("../fixtures/hypernyms.tsv")).map_err(|e| e.to_string())?;
    let res = Resources::<f64>::new().with_hypernyms(lex);
    let subset: BTreeSet<FeatureName> = [
        FeatureName::TokenPhraseType,
        FeatureName::TokenPhraseStructure,
        FeatureName::VerbPhraseStructure,
        FeatureName::TokenDirDpathFromVerb,
        FeatureName::TokenDirDpathFromVerbWithLemma,
        FeatureName::TokenDirDpathFromVerbWithPos,
        FeatureName::TokenIsUniqueSubjOrObj,
        FeatureName::HypernymsMcs,
    ]
    .into();
    let v = extract(0, &d.sentences[0], &res, &subset).map_err(|e| e.to_string())?;
    let got: BTreeSet<&str> = v.indicators.iter().map(String::as_str).collect();
    let want: BTreeSet<&str> = [
        "token_phrase_type=NP",
        "token_phrase_strcture=NP->NNS",
        "verb_phrase_structure=VP->VBD-S",
        "token_dir_dpath_from_verb=nsubj",
        "token_dir_dpath_from_verb_with_lemma=nsubj-continue",
        "token_dir_dpath_from_verb_with_pos=nsubj-VBD",
        "is_unique_nsubj=true",
        "hypernyms_mcs=body",
        "hypernyms_mcs=social_group",
        "hypernyms_mcs=group",
        "hypernyms_mcs=abstraction",
    ]
    .into();
    ensure(got == want && v.reals.is_empty(), format!("emitted {got:?}"))?;
    Ok(format!("{} indicators match exactly", want.len()))
}

fn c7_paths() -> Outcome {
    let mut pairs = 0;
    for seed in 0..200u64 {
        let heads = random_dep(seed);
        let tree = build_dep(&heads);
        for a in 0..heads.len() {
            for b in 0..heads.len() {
                let got: Vec<(String, bool)> = tree.undirected_path(a, b).map_err(|e| e.to_string())?
                    .steps().iter().map(|s| (s.relation.clone(), s.direction == Direction::Up)).collect();
                ensure(Some(got) == bfs_path(&heads, a, b, false), format!("undirected, seed {seed}"))?;
                let dir = tree.directed_path(a, b).map(|p| p.steps().iter().map(|s| (s.relation.clone(), false)).collect::<Vec<_>>());
                ensure(dir == bfs_path(&heads, a, b, true), format!("directed, seed {seed}"))?;
                pairs += 1;
            }
        }
        let t = random_const(seed);
        let ct = ConstTree::parse(&t.bracketed).map_err(|e| e.to_string())?;
        for a in 0..t.preterminals.len() {
            for b in 0..t.preterminals.len() {
                let (want, edges) = bfs_const(&t, t.preterminals[a], t.preterminals[b]);
                let p = ct.path(a, b);
                ensure(p.to_string() == want && p.len() == edges, format!("constituency, seed {seed}"))?;
                pairs += 1;
            }
        }
    }
    Ok(format!("200 dependency + 200 constituency trees, {pairs} node pairs"))
}

fn c8_verb_preps() -> Outcome {
    let corpus: Vec<Vec<(String, String)>> = (0..1000)
        .map(|k| {
            let next = if k < 451 { "to" } else { "on" };
            vec![
                ("They".into(), "they".into()),
                ("continued".into(), "continue".into()),
                (next.into(), next.into()),
                ("work".into(), "work".into()),
            ]
        })
        .collect();
    let preps: BTreeSet<String> = ["to".to_string()].into();
    let once: VerbPrepTable<f64> = build_verb_prep_table(&corpus, &preps, None).map_err(|e| e.to_string())?;
    let p = once.get("continue", "to");
    ensure(p == Some(0.451), format!("P = {p:?}"))?;
    let doubled: Vec<_> = corpus.iter().chain(&corpus).cloned().collect();
    let twice: VerbPrepTable<f64> = build_verb_prep_table(&doubled, &preps, None).map_err(|e| e.to_string())?;
    ensure(twice.to_tsv() == once.to_tsv(), "doubling changed the table")?;
    Ok("P(continue+to) = 0.451, unchanged when doubled".into())
}

fn c9_selection() -> Outcome {
    let pool: BTreeSet<FeatureName> = FeatureName::ALL[..12].iter().copied().collect();
    let opts = SelectionOptions::<f64>::default();
    let mono = select_features(Stage::ArgId, &BTreeSet::new(), &pool, |t| Ok(0.1 * t.len() as f64), 42, &opts)
        .map_err(|e| e.to_string())?;
    ensure(mono.selected == pool, "monotone evaluator rejected a candidate")?;
    let x = FeatureName::TokenPos;
    let single = select_features(Stage::Syn, &BTreeSet::new(), &pool, |t| Ok(if t.contains(&x) { 0.9 } else { 0.0 }), 42, &opts)
        .map_err(|e| e.to_string())?;
    ensure(single.selected == BTreeSet::from([x]), format!("selected {:?}", single.selected))?;
    let again = select_features(Stage::Syn, &BTreeSet::new(), &pool, |t| Ok(if t.contains(&x) { 0.9 } else { 0.0 }), 42, &opts)
        .map_err(|e| e.to_string())?;
    ensure(
        cpa_core::selection::format_trace(&again.trace) == cpa_core::selection::format_trace(&single.trace),
        "trace differs for the same seed",
    )?;
    let initial: BTreeSet<FeatureName> = [FeatureName::VerbLemma].into();
    let mut calls = 0;
    let empty = select_features(Stage::Sem, &initial, &BTreeSet::new(), |_| { calls += 1; Ok(1.0) }, 42, &opts)
        .map_err(|e| e.to_string())?;
    ensure(empty.selected == initial && empty.best == 0.0 && calls == 0, "empty pool altered the run")?;
    Ok("monotone, single-feature, reproducibility and empty-pool cases".into())
}

fn c10_end_to_end() -> Outcome {
    let start = Instant::now();
    let train_set = synthetic_corpus(20, Split::Train);
    let res = Resources::<f64>::new();
    let model = train_pipeline(&train_set, &synthetic_subsets(), &res, &TrainConfig::default()).map_err(|e| e.to_string())?;
    let preds: Vec<SentencePrediction> = annotate_all(&model, &train_set, &res).map_err(|e| e.to_string())?;
    for p in &preds {
        let tagged: BTreeSet<usize> = p.tags.keys().copied().collect();
        ensure(tagged.is_subset(&p.accepted), format!("containment broken in {}", p.id))?;
    }
    let report = score::<f64>(&train_set, &preds, ScoreOptions::default()).map_err(|e| e.to_string())?;
    ensure(report.overall == 1.0, format!("overall {}", report.overall))?;
    within(start.elapsed(), Duration::from_secs(30))?;
    Ok(format!("overall 1.000 in {:.2?}", start.elapsed()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("scorer aggregation oracle", c1_scorer_aggregation),
        ("scorer hand-count equivalence", c2_hand_count),
        ("maxent gradient check", c3_gradient),
        ("maxent normalization and invariances", c4_normalization),
        ("separable overfit", c5_separable),
        ("feature fixture", c6_feature_fixture),
        ("path-query oracle", c7_paths),
        ("verb-preposition table", c8_verb_preps),
        ("selection algorithm", c9_selection),
        ("end-to-end desk-scale run", c10_end_to_end),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", k + 1);
            }
        }
    }
    println!("criterion 11 INFO  full-scale results need the shared-task data and external resources; run `cpa score` on them");
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
