//! Greedy hill-climbing over feature subsets. Candidates are drawn in a
//! seeded random order; a candidate is kept only if it strictly improves
//! the best dev score so far.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::Dataset;
use crate::error::{Error, Result};
use crate::features::{extract, FeatureName, Stage};
use crate::io::{read_to_string, write_atomic};
use crate::maxent::TrainConfig;
use crate::pipeline::{train_stage, ARGUMENT};
use crate::resources::Resources;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct TraceEntry<T> {
    pub step: usize,
    pub feature: FeatureName,
    pub fscore: T,
    pub accepted: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SelectionRun<T> {
    pub stage: Stage,
    pub initial: BTreeSet<FeatureName>,
    pub pool: BTreeSet<FeatureName>,
    pub seed: u64,
    pub trace: Vec<TraceEntry<T>>,
    pub selected: BTreeSet<FeatureName>,
    pub best: T,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SelectionOptions<T> {
    /// Score the initial subset first instead of starting from zero.
    pub eval_initial: bool,
    /// A trace from an interrupted run with the same inputs; its entries are
    /// replayed instead of re-evaluated.
    pub resume: Vec<TraceEntry<T>>,
}

/// An evaluator failure, with the run as far as it got.
#[derive(Debug)]
pub struct SelectionFailure<T> {
    pub partial: SelectionRun<T>,
    pub source: Error,
}

impl<T> fmt::Display for SelectionFailure<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "feature selection stopped after {} steps: {}",
            self.partial.trace.len(),
            self.source
        )
    }
}

impl<T: fmt::Debug> std::error::Error for SelectionFailure<T> {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.source)
    }
}

/// The order in which candidates are tried for a given seed.
pub fn candidate_order(pool: &BTreeSet<FeatureName>, seed: u64) -> Vec<FeatureName> {
    let mut order: Vec<FeatureName> = pool.iter().copied().collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    order
}

pub fn select_features<T, E>(
    stage: Stage,
    initial: &BTreeSet<FeatureName>,
    pool: &BTreeSet<FeatureName>,
    mut evaluator: E,
    seed: u64,
    options: &SelectionOptions<T>,
) -> std::result::Result<SelectionRun<T>, SelectionFailure<T>>
where
    T: Scalar,
    E: FnMut(&BTreeSet<FeatureName>) -> Result<T>,
{
    let mut run = SelectionRun {
        stage,
        initial: initial.clone(),
        pool: pool.clone(),
        seed,
        trace: Vec::new(),
        selected: initial.clone(),
        best: T::zero(),
    };
    macro_rules! fail {
        ($err:expr) => {
            return Err(SelectionFailure {
                partial: run,
                source: $err,
            })
        };
    }
    if let Some(f) = initial.intersection(pool).next() {
        fail!(Error::Selection(format!(
            "feature {f} is both in the initial subset and the candidate pool"
        )));
    }
    let order = candidate_order(pool, seed);
    if options.resume.len() > order.len() {
        fail!(Error::Selection("resume trace is longer than the candidate pool".into()));
    }
    if options.eval_initial && !order.is_empty() {
        match evaluator(&run.selected) {
            Ok(v) => run.best = v,
            Err(e) => fail!(e),
        }
    }
    for (step, &feature) in order.iter().enumerate() {
        let mut candidate = run.selected.clone();
        candidate.insert(feature);
        let fscore = match options.resume.get(step) {
            Some(entry) if entry.step == step && entry.feature == feature => entry.fscore,
            Some(_) => fail!(Error::Selection(format!(
                "resume trace diverges at step {step}; it was produced with other inputs or another seed"
            ))),
            None => match evaluator(&candidate) {
                Ok(v) => v,
                Err(e) => fail!(e),
            },
        };
        let accepted = fscore > run.best;
        if let Some(entry) = options.resume.get(step) {
            if entry.accepted != accepted {
                fail!(Error::Selection(format!(
                    "resume trace disagrees on acceptance at step {step}"
                )));
            }
        }
        if accepted {
            run.best = fscore;
            run.selected = candidate;
        }
        log::info!(
            "{stage} step {step}: {feature} -> {fscore} ({})",
            if accepted { "kept" } else { "dropped" }
        );
        run.trace.push(TraceEntry {
            step,
            feature,
            fscore,
            accepted,
        });
    }
    Ok(run)
}

pub fn format_trace<T: Scalar>(trace: &[TraceEntry<T>]) -> String {
    let mut out = String::from("step\tfeature\tfscore\taccepted\n");
    for e in trace {
        let _ = writeln!(out, "{}\t{}\t{}\t{}", e.step, e.feature, e.fscore, e.accepted);
    }
    out
}

pub fn parse_trace<T: Scalar>(text: &str) -> Result<Vec<TraceEntry<T>>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.is_empty() || (i == 0 && line.starts_with("step\t")) {
            continue;
        }
        let bad = |what: &str| Error::parse(i + 1, format!("bad {what} in trace"));
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(bad("row"));
        }
        out.push(TraceEntry {
            step: fields[0].parse().map_err(|_| bad("step"))?,
            feature: fields[1].parse()?,
            fscore: fields[2].parse().map_err(|_| bad("score"))?,
            accepted: fields[3].parse().map_err(|_| bad("accepted flag"))?,
        });
    }
    Ok(out)
}

pub fn write_trace<T: Scalar>(trace: &[TraceEntry<T>], path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path, format_trace(trace).as_bytes())
}

pub fn read_trace<T: Scalar>(path: impl AsRef<Path>) -> Result<Vec<TraceEntry<T>>> {
    parse_trace(&read_to_string(path)?)
}

/// Trains one stage on `train` with `subset` and measures it on `dev`:
/// F1 of the `argument` class for argid, accuracy on gold arguments for
/// syn and sem.
pub fn dev_score<T: Scalar>(
    stage: Stage,
    subset: &BTreeSet<FeatureName>,
    train: &Dataset,
    dev: &Dataset,
    resources: &Resources<T>,
    config: &TrainConfig<T>,
) -> Result<T> {
    let model = train_stage(train, stage, subset, resources, config)?;
    let (mut correct, mut retrieved, mut reference) = (0, 0, 0);
    for s in &dev.sentences {
        for t in s.tokens.iter().filter(|t| !t.is_target_verb) {
            let gold = t.argument();
            if stage != Stage::ArgId && gold.is_none() {
                continue;
            }
            let predicted = model.predict(&extract(t.index, s, resources, subset)?).to_string();
            match (stage, gold) {
                (Stage::ArgId, g) => {
                    let hit = predicted == ARGUMENT;
                    reference += usize::from(g.is_some());
                    retrieved += usize::from(hit);
                    correct += usize::from(hit && g.is_some());
                }
                (Stage::Syn, Some(g)) => {
                    reference += 1;
                    correct += usize::from(predicted == g.syn.as_str());
                }
                (Stage::Sem, Some(g)) => {
                    reference += 1;
                    correct += usize::from(predicted == g.sem.as_str());
                }
                _ => unreachable!(),
            }
        }
    }
    Ok(match stage {
        Stage::ArgId => T::ratio(2 * correct, retrieved + reference),
        _ => T::ratio(correct, reference),
    })
}
