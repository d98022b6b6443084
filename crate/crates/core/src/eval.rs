//! Per-verb precision, recall and F1 for the syntactic and semantic layers.
//!
//! A tag is correct when it sits on the same token as a gold tag of the same
//! layer and has the same value. The averaged columns pool the two layers'
//! counts, which is what the published per-verb tables are consistent with.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::corpus::{Annotation, Dataset, SentencePrediction};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counts {
    pub correct: usize,
    pub retrieved: usize,
    pub reference: usize,
}

impl Counts {
    pub fn new(correct: usize, retrieved: usize, reference: usize) -> Self {
        Counts {
            correct,
            retrieved,
            reference,
        }
    }

    fn add(&mut self, other: Counts) {
        self.correct += other.correct;
        self.retrieved += other.retrieved;
        self.reference += other.reference;
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LayerStats<T> {
    pub correct: usize,
    pub retrieved: usize,
    pub reference: usize,
    pub precision: T,
    pub recall: T,
    pub f1: T,
}

impl<T: Scalar> LayerStats<T> {
    pub fn from_counts(correct: usize, retrieved: usize, reference: usize) -> Self {
        LayerStats {
            correct,
            retrieved,
            reference,
            precision: T::ratio(correct, retrieved),
            recall: T::ratio(correct, reference),
            // Equal to 2PR/(P+R), without the intermediate rounding.
            f1: T::ratio(2 * correct, retrieved + reference),
        }
    }

    pub fn counts(&self) -> Counts {
        Counts::new(self.correct, self.retrieved, self.reference)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Averaged<T> {
    pub precision: T,
    pub recall: T,
    pub f1: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerbScores<T> {
    pub verb: String,
    pub syn: LayerStats<T>,
    pub sem: LayerStats<T>,
    pub avg: Averaged<T>,
}

impl<T: Scalar> VerbScores<T> {
    pub fn from_counts(verb: impl Into<String>, syn: Counts, sem: Counts) -> Self {
        let mut pooled = syn;
        pooled.add(sem);
        let both = LayerStats::<T>::from_counts(pooled.correct, pooled.retrieved, pooled.reference);
        VerbScores {
            verb: verb.into(),
            syn: LayerStats::from_counts(syn.correct, syn.retrieved, syn.reference),
            sem: LayerStats::from_counts(sem.correct, sem.retrieved, sem.reference),
            avg: Averaged {
                precision: both.precision,
                recall: both.recall,
                f1: both.f1,
            },
        }
    }
}

/// Scores for every verb, sorted by verb lemma.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport<T> {
    pub verbs: Vec<VerbScores<T>>,
    /// Mean of the per-verb averaged F1.
    pub overall: T,
}

impl<T: Scalar> EvalReport<T> {
    pub fn from_verbs(mut verbs: Vec<VerbScores<T>>) -> Self {
        verbs.sort_by(|a, b| a.verb.cmp(&b.verb));
        let overall = mean(verbs.iter().map(|v| v.avg.f1));
        EvalReport { verbs, overall }
    }

    pub fn verb(&self, lemma: &str) -> Option<&VerbScores<T>> {
        self.verbs.iter().find(|v| v.verb == lemma)
    }

    /// Column-wise mean over verbs, in table order:
    /// syn P/R/F, sem P/R/F, avg P/R/F.
    pub fn average_row(&self) -> [T; 9] {
        let mut row = [T::zero(); 9];
        for (k, cell) in row.iter_mut().enumerate() {
            *cell = mean(self.verbs.iter().map(|v| columns(v)[k]));
        }
        row
    }
}

fn columns<T: Scalar>(v: &VerbScores<T>) -> [T; 9] {
    [
        v.syn.precision,
        v.syn.recall,
        v.syn.f1,
        v.sem.precision,
        v.sem.recall,
        v.sem.f1,
        v.avg.precision,
        v.avg.recall,
        v.avg.f1,
    ]
}

fn mean<T: Scalar>(values: impl Iterator<Item = T>) -> T {
    let mut n = 0;
    let mut total = T::zero();
    for v in values {
        total = total + v;
        n += 1;
    }
    if n == 0 {
        T::zero()
    } else {
        total / T::from_count(n)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ScoreOptions {
    /// Count the mechanically tagged verb row as a correct tag in both layers.
    pub count_verb_row: bool,
}

fn index_predictions<'a>(
    gold: &Dataset,
    predictions: &'a [SentencePrediction],
) -> Result<HashMap<&'a str, &'a SentencePrediction>> {
    let mut by_id = HashMap::new();
    for p in predictions {
        if gold.get(&p.id).is_none() {
            return Err(Error::Prediction(format!(
                "prediction for unknown sentence `{}`",
                p.id
            )));
        }
        if by_id.insert(p.id.as_str(), p).is_some() {
            return Err(Error::Prediction(format!(
                "two predictions for sentence `{}`",
                p.id
            )));
        }
    }
    Ok(by_id)
}

/// Visits each (gold, predicted) tag pair per sentence: `f(verb, gold, predicted)`.
fn for_each_tag<'a>(
    gold: &'a Dataset,
    predictions: &'a [SentencePrediction],
    options: ScoreOptions,
    mut f: impl FnMut(&'a str, Option<&Annotation>, Option<&Annotation>),
) -> Result<()> {
    let by_id = index_predictions(gold, predictions)?;
    let verb_row = Annotation::verb();
    for s in &gold.sentences {
        let pred = by_id.get(s.id.as_str()).map(|p| &p.tags);
        let gold_tags = s.gold_arguments();
        let mut positions: Vec<usize> = gold_tags.keys().copied().collect();
        if let Some(p) = pred {
            positions.extend(p.keys().copied());
        }
        positions.sort_unstable();
        positions.dedup();
        for i in positions {
            f(&s.verb_lemma, gold_tags.get(&i), pred.and_then(|p| p.get(&i)));
        }
        if options.count_verb_row {
            f(&s.verb_lemma, Some(&verb_row), Some(&verb_row));
        }
    }
    Ok(())
}

fn tally(counts: &mut Counts, gold: Option<&str>, predicted: Option<&str>) {
    if gold.is_some() {
        counts.reference += 1;
    }
    if predicted.is_some() {
        counts.retrieved += 1;
    }
    if gold.is_some() && gold == predicted {
        counts.correct += 1;
    }
}

/// Scores predictions against gold. Sentences without a prediction count as
/// predicted empty.
pub fn score<T: Scalar>(
    gold: &Dataset,
    predictions: &[SentencePrediction],
    options: ScoreOptions,
) -> Result<EvalReport<T>> {
    let mut per_verb: BTreeMap<&str, (Counts, Counts)> = BTreeMap::new();
    for s in &gold.sentences {
        per_verb.entry(s.verb_lemma.as_str()).or_default();
    }
    for_each_tag(gold, predictions, options, |verb, g, p| {
        let (syn, sem) = per_verb.entry(verb).or_default();
        tally(syn, g.map(|a| a.syn.as_str()), p.map(|a| a.syn.as_str()));
        tally(sem, g.map(|a| a.sem.as_str()), p.map(|a| a.sem.as_str()));
    })?;
    Ok(EvalReport::from_verbs(
        per_verb
            .into_iter()
            .map(|(verb, (syn, sem))| VerbScores::from_counts(verb, syn, sem))
            .collect(),
    ))
}

/// Dataset-wide statistics per tag value, one map per layer.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ClassBreakdown<T> {
    pub syn: BTreeMap<String, LayerStats<T>>,
    pub sem: BTreeMap<String, LayerStats<T>>,
}

pub fn per_class_breakdown<T: Scalar>(
    gold: &Dataset,
    predictions: &[SentencePrediction],
) -> Result<ClassBreakdown<T>> {
    let mut syn: BTreeMap<String, Counts> = BTreeMap::new();
    let mut sem: BTreeMap<String, Counts> = BTreeMap::new();
    fn class_tally(map: &mut BTreeMap<String, Counts>, g: Option<&str>, p: Option<&str>) {
        if let Some(g) = g {
            let c = map.entry(g.to_string()).or_default();
            c.reference += 1;
            if Some(g) == p {
                c.correct += 1;
            }
        }
        if let Some(p) = p {
            map.entry(p.to_string()).or_default().retrieved += 1;
        }
    }
    for_each_tag(gold, predictions, ScoreOptions::default(), |_, g, p| {
        class_tally(&mut syn, g.map(|a| a.syn.as_str()), p.map(|a| a.syn.as_str()));
        class_tally(&mut sem, g.map(|a| a.sem.as_str()), p.map(|a| a.sem.as_str()));
    })?;
    let finish = |m: BTreeMap<String, Counts>| {
        m.into_iter()
            .map(|(k, c)| (k, LayerStats::from_counts(c.correct, c.retrieved, c.reference)))
            .collect()
    };
    Ok(ClassBreakdown {
        syn: finish(syn),
        sem: finish(sem),
    })
}

/// How often each syntactic and semantic tag occurs as a gold argument tag.
pub fn class_frequencies(dataset: &Dataset) -> (BTreeMap<String, usize>, BTreeMap<String, usize>) {
    let mut syn = BTreeMap::new();
    let mut sem = BTreeMap::new();
    for t in dataset.sentences.iter().flat_map(|s| &s.tokens) {
        if let Some(a) = t.argument() {
            *syn.entry(a.syn.to_string()).or_insert(0) += 1;
            *sem.entry(a.sem.to_string()).or_insert(0) += 1;
        }
    }
    (syn, sem)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Tsv,
}

const COLUMNS: [&str; 9] = [
    "syn_P", "syn_R", "syn_F", "sem_P", "sem_R", "sem_F", "avg_P", "avg_R", "avg_F",
];

/// Renders the per-verb table with an AVERAGE row. An empty report yields
/// just the header.
pub fn emit_report<T: Scalar>(report: &EvalReport<T>, format: ReportFormat) -> String {
    let mut out = String::new();
    match format {
        ReportFormat::Text => {
            let width = report
                .verbs
                .iter()
                .map(|v| v.verb.chars().count())
                .chain([7])
                .max()
                .unwrap_or(7);
            let _ = write!(out, "{:<width$}", "verb");
            for c in COLUMNS {
                let _ = write!(out, "  {c:>6}");
            }
            out.push('\n');
            let mut line = |name: &str, row: [T; 9]| {
                let _ = write!(out, "{name:<width$}");
                for v in row {
                    let _ = write!(out, "  {:>6.3}", v.to_f64().unwrap_or(f64::NAN));
                }
                out.push('\n');
            };
            for v in &report.verbs {
                line(&v.verb, columns(v));
            }
            if !report.verbs.is_empty() {
                line("AVERAGE", report.average_row());
            }
        }
        ReportFormat::Tsv => {
            let _ = writeln!(out, "verb\t{}", COLUMNS.join("\t"));
            let mut line = |name: &str, row: [T; 9]| {
                out.push_str(name);
                for v in row {
                    let _ = write!(out, "\t{v}");
                }
                out.push('\n');
            };
            for v in &report.verbs {
                line(&v.verb, columns(v));
            }
            if !report.verbs.is_empty() {
                line("AVERAGE", report.average_row());
            }
        }
    }
    out
}

/// `class<TAB>frequency<TAB>f1` rows for classes with gold occurrences.
pub fn plot_data<T: Scalar>(
    classes: &BTreeMap<String, LayerStats<T>>,
    train_frequency: &BTreeMap<String, usize>,
) -> String {
    let mut out = String::from("class\tfrequency\tf1\n");
    for (class, stats) in classes {
        if stats.reference == 0 {
            continue;
        }
        let freq = train_frequency.get(class).copied().unwrap_or(0);
        let _ = writeln!(out, "{class}\t{freq}\t{}", stats.f1);
    }
    out
}
