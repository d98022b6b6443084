#![allow(dead_code)]

pub mod trees;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use cpa_core::corpus::{parse_corpus, Annotation, Dataset, SemTag, SentencePrediction, Split, SynTag};
use cpa_core::features::{FeatureName, FeatureSubset};

const HUMANS: [&str; 4] = ["teacher", "farmer", "pilot", "nurse"];
const ARTIFACTS: [&str; 4] = ["hammer", "engine", "lever", "boat"];
const VERBS: [(&str, &str); 2] = [("crush", "crushed"), ("operate", "operated")];

fn class_of(noun: &str) -> &'static str {
    if HUMANS.contains(&noun) {
        "Human"
    } else {
        "Artifact"
    }
}

/// One synthetic sentence "The N1 V the N2 ." in the enriched corpus format.
/// Both nouns are arguments (subj, obj) whose semantic class follows the noun.
pub fn synthetic_sentence(k: usize) -> String {
    let (subj_group, obj_group) = if (k / 2) % 2 == 0 {
        (HUMANS, ARTIFACTS)
    } else {
        (ARTIFACTS, HUMANS)
    };
    let subj = subj_group[k % 4];
    let obj = obj_group[(k + 1) % 4];
    let (lemma, form) = VERBS[k % 2];
    let mut s = String::new();
    let _ = writeln!(s, "#id syn{k:02}");
    let _ = writeln!(s, "#verb {lemma}");
    let _ = writeln!(
        s,
        "#parse (ROOT (S (NP (DT The) (NN {subj})) (VP (VBD {form}) (NP (DT the) (NN {obj}))) (. .)))"
    );
    let rows = [
        ("The", "the", "DT", 1, "det", "", ""),
        (subj, subj, "NN", 2, "nsubj", "subj", class_of(subj)),
        (form, lemma, "VBD", -1, "root", "v", "_"),
        ("the", "the", "DT", 4, "det", "", ""),
        (obj, obj, "NN", 2, "dobj", "obj", class_of(obj)),
        (".", ".", ".", 2, "punct", "", ""),
    ];
    for (i, (w, l, p, h, r, syn, sem)) in rows.iter().enumerate() {
        let _ = writeln!(s, "{i}\t{w}\t{l}\t{p}\t{h}\t{r}\t{h}\t{r}\t{syn}\t{sem}");
    }
    s
}

pub fn synthetic_corpus_text(n: usize) -> String {
    (0..n).map(synthetic_sentence).collect::<Vec<_>>().join("\n")
}

pub fn synthetic_corpus(n: usize, split: Split) -> Dataset {
    parse_corpus(&synthetic_corpus_text(n), split).expect("synthetic corpus parses")
}

/// Features that separate the synthetic corpus at every stage.
pub fn synthetic_subsets() -> FeatureSubset {
    let f: BTreeSet<FeatureName> = [
        FeatureName::TokenLemma,
        FeatureName::TokenPos,
        FeatureName::TokenRelFromVerb,
        FeatureName::TokenDirDpathFromVerb,
    ]
    .into();
    FeatureSubset::uniform(f)
}

fn ann(syn: SynTag, sem: &str) -> Annotation {
    Annotation::new(syn, SemTag::new(sem).unwrap())
}

/// Three sentences with 4 gold argument tags, and predictions with 3
/// retrieved tags of which 2 are correct in both layers.
pub fn handmade_scoring_case() -> (Dataset, Vec<SentencePrediction>) {
    let base = synthetic_corpus(3, Split::Test);
    let mut sentences = base.sentences.clone();
    sentences[2] = sentences[2].with_arguments(&BTreeMap::new()).unwrap();
    let gold = Dataset::new(sentences, Split::Test).unwrap();

    let mut p0 = SentencePrediction::from_gold(&gold.sentences[0]);
    p0.accepted = p0.tags.keys().copied().collect();
    let mut p1 = SentencePrediction::empty(gold.sentences[1].id.clone());
    let wrong = ann(SynTag::Subj, "Human");
    assert_ne!(gold.sentences[1].tokens[4].gold.as_ref(), Some(&wrong));
    p1.tags.insert(4, wrong);
    p1.accepted.insert(4);
    (gold, vec![p0, p1])
}

/// Independent tag tally: (correct, retrieved, reference) for one layer.
pub fn brute_force_tally(
    gold: &Dataset,
    predictions: &[SentencePrediction],
    layer: impl Fn(&Annotation) -> String,
) -> (usize, usize, usize) {
    let (mut c, mut ret, mut rf) = (0, 0, 0);
    for s in &gold.sentences {
        let pred = predictions.iter().find(|p| p.id == s.id);
        for t in &s.tokens {
            let g = t.argument().map(&layer);
            let p = pred.and_then(|p| p.tags.get(&t.index)).map(&layer);
            rf += g.is_some() as usize;
            ret += p.is_some() as usize;
            c += (g.is_some() && g == p) as usize;
        }
    }
    (c, ret, rf)
}

/// Per-verb rows of the published breakdown: syn P/R/F, sem P/R/F, avg P/R/F.
pub const TABLE8: [(&str, [f64; 9]); 7] = [
    ("crush", [0.836, 0.729, 0.779, 0.484, 0.436, 0.459, 0.657, 0.582, 0.617]),
    ("continue", [0.92, 0.84, 0.878, 0.634, 0.578, 0.605, 0.777, 0.709, 0.741]),
    ("operate", [0.788, 0.532, 0.635, 0.327, 0.21, 0.256, 0.563, 0.371, 0.447]),
    ("decline", [0.898, 0.838, 0.867, 0.626, 0.578, 0.601, 0.763, 0.708, 0.734]),
    ("undertake", [0.754, 0.717, 0.735, 0.585, 0.546, 0.565, 0.67, 0.632, 0.65]),
    ("apprehend", [0.825, 0.722, 0.77, 0.745, 0.634, 0.685, 0.786, 0.678, 0.728]),
    ("appreciate", [0.908, 0.713, 0.798, 0.716, 0.559, 0.628, 0.812, 0.636, 0.713]),
];

pub const TABLE8_AVERAGE: [f64; 9] = [0.847, 0.727, 0.78, 0.588, 0.506, 0.543, 0.718, 0.617, 0.661];

/// Layer counts reproducing a published (P, R) pair, with the two layers
/// sharing one reference count.
pub fn contrived_counts(precision: f64, recall: f64, reference: usize) -> (usize, usize, usize) {
    let correct = (recall * reference as f64).round() as usize;
    let retrieved = (correct as f64 / precision).round() as usize;
    (correct, retrieved, reference)
}
