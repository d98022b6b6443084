use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::io::{read_to_string, write_atomic};
use crate::scalar::Scalar;

/// Raw adjacency counts. Shards of a corpus can be counted separately and
/// merged; merging is associative and commutative.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PrepCounts {
    verbs: BTreeMap<String, u64>,
    pairs: BTreeMap<(String, String), u64>,
}

impl PrepCounts {
    /// Counts verb-lemma tokens and, for each, whether the next surface word
    /// (lowercased) is one of `preps`. `verbs` restricts which lemmas are
    /// counted; `None` counts every lemma.
    pub fn observe<W: AsRef<str>, L: AsRef<str>>(
        &mut self,
        sentence: &[(W, L)],
        preps: &BTreeSet<String>,
        verbs: Option<&BTreeSet<String>>,
    ) {
        for (i, (_, lemma)) in sentence.iter().enumerate() {
            let lemma = lemma.as_ref();
            if verbs.is_some_and(|v| !v.contains(lemma)) {
                continue;
            }
            *self.verbs.entry(lemma.to_string()).or_default() += 1;
            if let Some((next, _)) = sentence.get(i + 1) {
                let next = next.as_ref().to_lowercase();
                if preps.contains(&next) {
                    *self.pairs.entry((lemma.to_string(), next)).or_default() += 1;
                }
            }
        }
    }

    pub fn merge(&mut self, other: &PrepCounts) {
        for (v, c) in &other.verbs {
            *self.verbs.entry(v.clone()).or_default() += c;
        }
        for (k, c) in &other.pairs {
            *self.pairs.entry(k.clone()).or_default() += c;
        }
    }

    /// Every counted verb gets one entry per preposition, zeros included.
    pub fn to_table<T: Scalar>(&self, preps: &BTreeSet<String>) -> VerbPrepTable<T> {
        let mut probs = BTreeMap::new();
        for (verb, &count) in &self.verbs {
            let row: BTreeMap<String, T> = preps
                .iter()
                .map(|p| {
                    let pair = self
                        .pairs
                        .get(&(verb.clone(), p.clone()))
                        .copied()
                        .unwrap_or(0);
                    (p.clone(), T::ratio(pair as usize, count as usize))
                })
                .collect();
            probs.insert(verb.clone(), row);
        }
        VerbPrepTable {
            probs,
            counts: Some(self.verbs.clone()),
        }
    }
}

/// Probability that a verb is immediately followed by each preposition.
#[derive(Clone, Debug, PartialEq)]
pub struct VerbPrepTable<T> {
    probs: BTreeMap<String, BTreeMap<String, T>>,
    /// Verb occurrence counts; absent for tables loaded from TSV.
    counts: Option<BTreeMap<String, u64>>,
}

impl<T: Scalar> VerbPrepTable<T> {
    pub fn probabilities(&self, verb: &str) -> Option<&BTreeMap<String, T>> {
        self.probs.get(verb)
    }

    pub fn get(&self, verb: &str, prep: &str) -> Option<T> {
        self.probs.get(verb)?.get(prep).copied()
    }

    pub fn verb_count(&self, verb: &str) -> Option<u64> {
        self.counts.as_ref()?.get(verb).copied()
    }

    pub fn verbs(&self) -> impl Iterator<Item = &str> {
        self.probs.keys().map(String::as_str)
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (verb, row) in &self.probs {
            for (prep, p) in row {
                let _ = writeln!(out, "{verb}\t{prep}\t{p}");
            }
        }
        out
    }

    pub fn parse_tsv(text: &str) -> Result<Self> {
        let mut probs: BTreeMap<String, BTreeMap<String, T>> = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 3 {
                return Err(Error::parse(i + 1, "expected `verb<TAB>prep<TAB>probability`"));
            }
            let p: T = f[2]
                .parse()
                .map_err(|_| Error::parse(i + 1, format!("bad probability `{}`", f[2])))?;
            if !(p >= T::zero() && p <= T::one()) {
                return Err(Error::parse(i + 1, format!("probability {p} outside [0, 1]")));
            }
            probs.entry(f[0].to_string()).or_default().insert(f[1].to_string(), p);
        }
        Ok(VerbPrepTable { probs, counts: None })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        write_atomic(path, self.to_tsv().as_bytes())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_tsv(&read_to_string(path)?)
    }
}

/// Counts `P(v+p) = count(v followed by p) / count(v)` over a tokenized
/// corpus of `(word, lemma)` sentences.
pub fn build_verb_prep_table<T, I, S, W, L>(
    corpus: I,
    advprep_words: &BTreeSet<String>,
    verbs: Option<&BTreeSet<String>>,
) -> Result<VerbPrepTable<T>>
where
    T: Scalar,
    I: IntoIterator<Item = S>,
    S: AsRef<[(W, L)]>,
    W: AsRef<str>,
    L: AsRef<str>,
{
    if advprep_words.is_empty() {
        return Err(Error::Resource("advprep word list is empty".into()));
    }
    let preps: BTreeSet<String> = advprep_words.iter().map(|p| p.to_lowercase()).collect();
    let mut counts = PrepCounts::default();
    for sentence in corpus {
        counts.observe(sentence.as_ref(), &preps, verbs);
    }
    Ok(counts.to_table(&preps))
}

/// Reads sentences of `(word, lemma)` pairs from a tab-separated file with
/// blank lines between sentences. Rows have either two columns
/// (`word lemma`) or the ten columns of the enriched corpus format; `#`
/// lines are skipped.
pub fn read_token_stream(path: impl AsRef<Path>) -> Result<Vec<Vec<(String, String)>>> {
    parse_token_stream(&read_to_string(path)?)
}

pub fn parse_token_stream(text: &str) -> Result<Vec<Vec<(String, String)>>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        let (word, lemma) = match f.len() {
            2 => (f[0], f[1]),
            10 => (f[1], f[2]),
            n => {
                return Err(Error::parse(
                    i + 1,
                    format!("expected 2 or 10 tab-separated columns, found {n}"),
                ))
            }
        };
        cur.push((word.to_string(), lemma.to_string()));
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    Ok(out)
}
