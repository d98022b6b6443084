mod common;

use std::collections::{BTreeMap, BTreeSet};

use cpa_core::corpus::{parse_corpus, Dataset, SentencePrediction, Split};
use cpa_core::eval::{score, ScoreOptions};
use cpa_core::features::FeatureSubset;
use cpa_core::maxent::{MaxentModel, TrainConfig};
use cpa_core::pipeline::{annotate, annotate_all, train_pipeline, PipelineModel, ARGUMENT, NONE};
use cpa_core::resources::Resources;
use common::*;

fn check_containment(preds: &[SentencePrediction], gold: &Dataset) {
    for p in preds {
        let tagged: BTreeSet<usize> = p.tags.keys().copied().collect();
        assert!(tagged.is_subset(&p.accepted));
        let s = gold.get(&p.id).unwrap();
        assert!(!p.accepted.contains(&s.verb_index()));
        assert!(p.tags.values().all(|a| !a.is_verb() && !a.sem.is_verb()));
    }
}

#[test]
fn synthetic_corpus_round_trip() {
    let train = synthetic_corpus(20, Split::Train);
    let res = Resources::<f64>::new();
    let model = train_pipeline(&train, &synthetic_subsets(), &res, &TrainConfig::default()).unwrap();
    let preds = annotate_all(&model, &train, &res).unwrap();
    assert_eq!(preds.len(), 20);
    assert!(preds.iter().zip(&train.sentences).all(|(p, s)| p.id == s.id));
    check_containment(&preds, &train);
    let report = score::<f64>(&train, &preds, ScoreOptions::default()).unwrap();
    assert_eq!(report.overall, 1.0);
    assert!(model.syn.classes().iter().all(|c| c != "v"));
    assert!(model.sem.classes().iter().all(|c| c != "_"));
}

#[test]
fn retraining_writes_identical_files() {
    let train = synthetic_corpus(20, Split::Train);
    let res = Resources::<f64>::new();
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let m = train_pipeline(&train, &synthetic_subsets(), &res, &TrainConfig::default()).unwrap();
        m.save(d.path()).unwrap();
    }
    for f in ["argid.model", "syn.model", "sem.model", "subsets.txt", "manifest.txt"] {
        let a = std::fs::read(dirs[0].path().join(f)).unwrap();
        let b = std::fs::read(dirs[1].path().join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
    let loaded = PipelineModel::<f64>::load(dirs[0].path()).unwrap();
    let fresh = train_pipeline(&train, &synthetic_subsets(), &res, &TrainConfig::default()).unwrap();
    assert_eq!(loaded, fresh);
}

#[test]
fn walkthrough_sentence_is_reproduced() {
    let walk = parse_corpus(include_str!("../fixtures/walkthrough.conll"), Split::Train).unwrap();
    let table1 = parse_corpus(include_str!("../fixtures/table1.conll"), Split::Train).unwrap();
    let mut sentences = walk.sentences.clone();
    sentences.extend(table1.sentences);
    let train = Dataset::new(sentences, Split::Train).unwrap();
    let res = Resources::<f64>::new();
    let model = train_pipeline(&train, &synthetic_subsets(), &res, &TrainConfig::default()).unwrap();
    let p = annotate(&model, &walk.sentences[0], &res).unwrap();
    let got: Vec<(usize, String, String)> = p
        .tags
        .iter()
        .map(|(i, a)| (*i, a.syn.to_string(), a.sem.to_string()))
        .collect();
    assert_eq!(
        got,
        [
            (0, "subj".into(), "Institution".into()),
            (2, "advprep".into(), "LexicalItem".into()),
            (3, "acomp".into(), "Action".into()),
        ]
    );
}

#[test]
fn rejecting_argid_leaves_only_the_verb() {
    let train = synthetic_corpus(8, Split::Train);
    let res = Resources::<f64>::new();
    let mut model = train_pipeline(&train, &synthetic_subsets(), &res, &TrainConfig::default()).unwrap();
    let weights = BTreeMap::from([(
        "<bias>".to_string(),
        BTreeMap::from([(ARGUMENT.to_string(), -1000.0), (NONE.to_string(), 1000.0)]),
    )]);
    model.argid = MaxentModel::from_weights(vec![ARGUMENT.into(), NONE.into()], weights, 1.0).unwrap();
    for s in &train.sentences {
        let p = annotate(&model, s, &res).unwrap();
        assert!(p.tags.is_empty() && p.accepted.is_empty());
    }
    let preds = annotate_all(&model, &train, &res).unwrap();
    let text = cpa_core::corpus::format_predictions(&train, &preds).unwrap();
    let verb_rows = text.lines().filter(|l| l.ends_with("\tv\t_")).count();
    assert_eq!(verb_rows, 8);
}

#[test]
fn recall_bound_holds() {
    let train = synthetic_corpus(20, Split::Train);
    let held_out: Vec<String> = (20..24).map(synthetic_sentence).collect();
    let test = parse_corpus(&held_out.join("\n"), Split::Test).unwrap();
    let res = Resources::<f64>::new();
    let subsets = FeatureSubset::uniform([cpa_core::features::FeatureName::TokenPos].into());
    let model = train_pipeline(&train, &subsets, &res, &TrainConfig::default()).unwrap();
    let preds = annotate_all(&model, &test, &res).unwrap();
    let accepted_gold: usize = preds
        .iter()
        .map(|p| {
            let s = test.get(&p.id).unwrap();
            p.accepted.iter().filter(|&&i| s.tokens[i].argument().is_some()).count()
        })
        .sum();
    let report = score::<f64>(&test, &preds, ScoreOptions::default()).unwrap();
    let sem_correct: usize = report.verbs.iter().map(|v| v.sem.correct).sum();
    assert!(sem_correct <= accepted_gold);
}
