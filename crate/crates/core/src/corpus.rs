//! Annotated sentences and the enriched corpus format.
//!
//! A corpus file is UTF-8 text with one block per sentence, blocks separated
//! by blank lines. Each block starts with `#id`, `#verb` and `#parse` header
//! lines followed by one tab-separated row per token:
//!
//! ```text
//! index  word  lemma  pos  basic_head  basic_rel  coll_head  coll_rel  syn_tag  sem_tag
//! ```
//!
//! Heads are 0-based token indices, `-1` for the root, or `_` for tokens that
//! have no node in the collapsed tree. Tag fields are empty for unannotated
//! tokens; the target verb row carries `v` and `_`.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::{self, Write as _};
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::io::write_atomic;
use crate::trees::{ConstTree, DepTree, HeadSpec};

/// Syntactic function of an argument, plus `v` for the target verb itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SynTag {
    Subj,
    Obj,
    Iobj,
    Advprep,
    Acomp,
    Scomp,
    V,
}

impl SynTag {
    pub const ARGUMENTS: [SynTag; 6] = [
        SynTag::Subj,
        SynTag::Obj,
        SynTag::Iobj,
        SynTag::Advprep,
        SynTag::Acomp,
        SynTag::Scomp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SynTag::Subj => "subj",
            SynTag::Obj => "obj",
            SynTag::Iobj => "iobj",
            SynTag::Advprep => "advprep",
            SynTag::Acomp => "acomp",
            SynTag::Scomp => "scomp",
            SynTag::V => "v",
        }
    }
}

impl fmt::Display for SynTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SynTag {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s {
            "subj" => SynTag::Subj,
            "obj" => SynTag::Obj,
            "iobj" => SynTag::Iobj,
            "advprep" => SynTag::Advprep,
            "acomp" => SynTag::Acomp,
            "scomp" => SynTag::Scomp,
            "v" => SynTag::V,
            other => return Err(format!("unknown syntactic tag `{other}`")),
        })
    }
}

/// Semantic class label, or `_` on the target verb.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SemTag(String);

impl SemTag {
    pub const VERB: &'static str = "_";

    pub fn new(label: impl Into<String>) -> std::result::Result<Self, String> {
        let label = label.into();
        if label.is_empty() {
            return Err("empty semantic tag".into());
        }
        if label.chars().any(|c| c == '\t' || c == '\n' || c == '\r') {
            return Err(format!("semantic tag {label:?} contains a tab or newline"));
        }
        Ok(SemTag(label))
    }

    pub fn verb() -> Self {
        SemTag(Self::VERB.into())
    }

    pub fn is_verb(&self) -> bool {
        self.0 == Self::VERB
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SemTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A joint syntactic and semantic tag on one token.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Annotation {
    pub syn: SynTag,
    pub sem: SemTag,
}

impl Annotation {
    pub fn new(syn: SynTag, sem: SemTag) -> Self {
        Annotation { syn, sem }
    }

    pub fn verb() -> Self {
        Annotation {
            syn: SynTag::V,
            sem: SemTag::verb(),
        }
    }

    pub fn is_verb(&self) -> bool {
        self.syn == SynTag::V
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub index: usize,
    pub word: String,
    pub lemma: String,
    pub pos: String,
    pub is_target_verb: bool,
    pub gold: Option<Annotation>,
}

impl Token {
    pub fn new(
        index: usize,
        word: impl Into<String>,
        lemma: impl Into<String>,
        pos: impl Into<String>,
    ) -> Self {
        Token {
            index,
            word: word.into(),
            lemma: lemma.into(),
            pos: pos.into(),
            is_target_verb: false,
            gold: None,
        }
    }

    /// Gold annotation on an argument token (never the verb row).
    pub fn argument(&self) -> Option<&Annotation> {
        self.gold.as_ref().filter(|a| !a.is_verb())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sentence {
    pub id: String,
    pub verb_lemma: String,
    pub tokens: Vec<Token>,
    pub dep_basic: DepTree,
    pub dep_collapsed: DepTree,
    pub const_tree: ConstTree,
    verb: usize,
}

impl Sentence {
    /// Builds a sentence and checks the cross-layer invariants. The target
    /// verb is the token whose gold syntactic tag is `v`.
    pub fn new(
        id: impl Into<String>,
        verb_lemma: impl Into<String>,
        mut tokens: Vec<Token>,
        dep_basic: DepTree,
        dep_collapsed: DepTree,
        const_tree: ConstTree,
    ) -> Result<Self> {
        let id = id.into();
        if id.is_empty() || id.chars().any(char::is_whitespace) {
            return Err(Error::invariant(&id, "sentence id must be non-empty without whitespace"));
        }
        if tokens.is_empty() {
            return Err(Error::invariant(&id, "sentence has no tokens"));
        }
        let mut verb = None;
        for (i, t) in tokens.iter_mut().enumerate() {
            if t.index != i {
                return Err(Error::invariant(
                    &id,
                    format!("token at position {i} has index {}", t.index),
                ));
            }
            let is_verb_row = match &t.gold {
                Some(a) if a.syn == SynTag::V && a.sem.is_verb() => true,
                Some(a) if a.syn == SynTag::V || a.sem.is_verb() => {
                    return Err(Error::invariant(
                        &id,
                        format!("token {i} mixes verb and argument tags ({}, {})", a.syn, a.sem),
                    ))
                }
                _ => false,
            };
            if is_verb_row {
                if let Some(prev) = verb {
                    return Err(Error::invariant(
                        &id,
                        format!("tokens {prev} and {i} are both marked as the target verb"),
                    ));
                }
                verb = Some(i);
            }
            t.is_target_verb = is_verb_row;
        }
        let verb = verb.ok_or_else(|| Error::invariant(&id, "no token is marked as the target verb"))?;

        let n = tokens.len();
        if dep_basic.len() != n || dep_collapsed.len() != n {
            return Err(Error::invariant(&id, "dependency trees do not cover the token list"));
        }
        if let Some(i) = (0..n).find(|&i| !dep_basic.contains(i)) {
            return Err(Error::invariant(&id, format!("token {i} missing from the basic tree")));
        }
        if const_tree.leaf_count() != n {
            return Err(Error::invariant(
                &id,
                format!(
                    "constituency tree has {} leaves for {n} tokens",
                    const_tree.leaf_count()
                ),
            ));
        }
        for (i, (leaf, tok)) in const_tree.words().zip(&tokens).enumerate() {
            if !same_surface(leaf, &tok.word) {
                return Err(Error::invariant(
                    &id,
                    format!("leaf {i} `{leaf}` does not match token `{}`", tok.word),
                ));
            }
        }
        Ok(Sentence {
            id,
            verb_lemma: verb_lemma.into(),
            tokens,
            dep_basic,
            dep_collapsed,
            const_tree,
            verb,
        })
    }

    pub fn verb_index(&self) -> usize {
        self.verb
    }

    pub fn verb(&self) -> &Token {
        &self.tokens[self.verb]
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Gold argument annotations keyed by token index, verb row excluded.
    pub fn gold_arguments(&self) -> BTreeMap<usize, Annotation> {
        self.tokens
            .iter()
            .filter_map(|t| t.argument().map(|a| (t.index, a.clone())))
            .collect()
    }

    /// Copy of the sentence with gold argument tags replaced by `assignments`.
    pub fn with_arguments(&self, assignments: &BTreeMap<usize, Annotation>) -> Result<Sentence> {
        let mut out = self.clone();
        for t in &mut out.tokens {
            if !t.is_target_verb {
                t.gold = None;
            }
        }
        for (&i, a) in assignments {
            if i >= out.tokens.len() {
                return Err(Error::Prediction(format!(
                    "sentence {}: token index {i} out of range ({} tokens)",
                    self.id,
                    out.tokens.len()
                )));
            }
            if i == self.verb || a.syn == SynTag::V || a.sem.is_verb() {
                return Err(Error::Prediction(format!(
                    "sentence {}: verb tags are fixed and cannot be predicted (token {i})",
                    self.id
                )));
            }
            out.tokens[i].gold = Some(a.clone());
        }
        Ok(out)
    }
}

/// Parsers escape brackets in tree leaves.
fn same_surface(leaf: &str, word: &str) -> bool {
    if leaf == word {
        return true;
    }
    let unescaped = match leaf {
        "-LRB-" => "(",
        "-RRB-" => ")",
        "-LSB-" => "[",
        "-RSB-" => "]",
        "-LCB-" => "{",
        "-RCB-" => "}",
        _ => return false,
    };
    unescaped == word
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Split {
    Train,
    Dev,
    Test,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dataset {
    pub sentences: Vec<Sentence>,
    pub split: Split,
}

impl Dataset {
    pub fn new(sentences: Vec<Sentence>, split: Split) -> Result<Self> {
        let mut seen = HashSet::new();
        for s in &sentences {
            if !seen.insert(s.id.as_str()) {
                return Err(Error::invariant(&s.id, "duplicate sentence id"));
            }
        }
        Ok(Dataset { sentences, split })
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Sentence> {
        self.sentences.iter().find(|s| s.id == id)
    }

    pub fn verbs(&self) -> BTreeSet<&str> {
        self.sentences.iter().map(|s| s.verb_lemma.as_str()).collect()
    }

    /// Number of annotated argument tokens (verb rows excluded).
    pub fn argument_count(&self) -> usize {
        self.sentences
            .iter()
            .flat_map(|s| &s.tokens)
            .filter(|t| t.argument().is_some())
            .count()
    }
}

/// Predicted argument tags for one sentence. The verb row is implicit.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SentencePrediction {
    pub id: String,
    pub tags: BTreeMap<usize, Annotation>,
    /// Tokens the argument identifier accepted; equal to the keys of `tags`
    /// for predictions produced by the pipeline or read from a file.
    pub accepted: BTreeSet<usize>,
}

impl SentencePrediction {
    pub fn empty(id: impl Into<String>) -> Self {
        SentencePrediction {
            id: id.into(),
            ..Default::default()
        }
    }

    /// Treats the gold layer of a sentence as a prediction.
    pub fn from_gold(sentence: &Sentence) -> Self {
        let tags = sentence.gold_arguments();
        let accepted = tags.keys().copied().collect();
        SentencePrediction {
            id: sentence.id.clone(),
            tags,
            accepted,
        }
    }

    pub fn from_dataset(dataset: &Dataset) -> Vec<SentencePrediction> {
        dataset.sentences.iter().map(Self::from_gold).collect()
    }
}

fn split_fields(line: &str) -> Vec<&str> {
    line.split('\t').collect()
}

fn parse_head(field: &str, rel: &str, line: usize, collapsed: bool) -> Result<HeadSpec> {
    if field == "_" {
        if collapsed {
            return Ok(HeadSpec::Absent);
        }
        return Err(Error::parse(line, "basic dependency head must be an index or -1"));
    }
    let h: i64 = field
        .parse()
        .map_err(|_| Error::parse(line, format!("bad head `{field}`")))?;
    if rel.is_empty() || rel == "_" {
        return Err(Error::parse(line, "missing dependency relation"));
    }
    match h {
        -1 => Ok(HeadSpec::Root(rel.to_string())),
        h if h >= 0 => Ok(HeadSpec::Head(h as usize, rel.to_string())),
        _ => Err(Error::parse(line, format!("bad head `{field}`"))),
    }
}

struct Block {
    start: usize,
    id: Option<String>,
    verb: Option<String>,
    parse: Option<(usize, String)>,
    tokens: Vec<Token>,
    basic: Vec<HeadSpec>,
    collapsed: Vec<HeadSpec>,
}

impl Block {
    fn new(start: usize) -> Self {
        Block {
            start,
            id: None,
            verb: None,
            parse: None,
            tokens: Vec::new(),
            basic: Vec::new(),
            collapsed: Vec::new(),
        }
    }

    fn finish(self) -> Result<Sentence> {
        let id = self
            .id
            .ok_or_else(|| Error::parse(self.start, "sentence block without `#id`"))?;
        let verb = self
            .verb
            .ok_or_else(|| Error::parse(self.start, format!("sentence {id} has no `#verb` line")))?;
        let (parse_line, parse) = self
            .parse
            .ok_or_else(|| Error::parse(self.start, format!("sentence {id} has no `#parse` line")))?;
        let const_tree =
            ConstTree::parse(&parse).map_err(|e| Error::parse(parse_line, e.to_string()))?;
        let basic = DepTree::new(self.basic)
            .map_err(|e| Error::invariant(&id, format!("basic {e}")))?;
        let collapsed = DepTree::new(self.collapsed)
            .map_err(|e| Error::invariant(&id, format!("collapsed {e}")))?;
        Sentence::new(id, verb, self.tokens, basic, collapsed, const_tree)
    }
}

/// Parses the enriched corpus format from a string.
pub fn parse_corpus(text: &str, split: Split) -> Result<Dataset> {
    let mut sentences = Vec::new();
    let mut block: Option<Block> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() {
            if let Some(b) = block.take() {
                sentences.push(b.finish()?);
            }
            continue;
        }
        let b = block.get_or_insert_with(|| Block::new(line_no));
        if let Some(header) = line.strip_prefix('#') {
            if !b.tokens.is_empty() {
                return Err(Error::parse(line_no, "header line after token rows"));
            }
            let (key, value) = header.split_once(' ').unwrap_or((header, ""));
            let value = value.trim();
            match key {
                "id" => b.id = Some(value.to_string()),
                "verb" => b.verb = Some(value.to_string()),
                "parse" => b.parse = Some((line_no, value.to_string())),
                // free-form comment
                "" => {}
                other => return Err(Error::parse(line_no, format!("unknown header `#{other}`"))),
            }
            if matches!(key, "id" | "verb" | "parse") && value.is_empty() {
                return Err(Error::parse(line_no, format!("empty `#{key}` header")));
            }
            continue;
        }
        let f = split_fields(line);
        if f.len() != 10 {
            return Err(Error::parse(
                line_no,
                format!("expected 10 tab-separated columns, found {}", f.len()),
            ));
        }
        let index: usize = f[0]
            .parse()
            .map_err(|_| Error::parse(line_no, format!("bad token index `{}`", f[0])))?;
        if index != b.tokens.len() {
            return Err(Error::parse(
                line_no,
                format!("token index {index}, expected {}", b.tokens.len()),
            ));
        }
        if f[1].is_empty() || f[2].is_empty() || f[3].is_empty() {
            return Err(Error::parse(line_no, "word, lemma and POS must be non-empty"));
        }
        b.basic.push(parse_head(f[4], f[5], line_no, false)?);
        b.collapsed.push(parse_head(f[6], f[7], line_no, true)?);
        let gold = match (f[8], f[9]) {
            ("", "") => None,
            ("", _) | (_, "") => {
                return Err(Error::parse(
                    line_no,
                    "syntactic and semantic tags must be both present or both empty",
                ))
            }
            (syn, sem) => Some(Annotation::new(
                syn.parse().map_err(|e: String| Error::parse(line_no, e))?,
                SemTag::new(sem).map_err(|e| Error::parse(line_no, e))?,
            )),
        };
        let mut token = Token::new(index, f[1], f[2], f[3]);
        token.gold = gold;
        b.tokens.push(token);
    }
    if let Some(b) = block.take() {
        sentences.push(b.finish()?);
    }
    Dataset::new(sentences, split)
}

pub fn read_corpus(path: impl AsRef<Path>, split: Split) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_corpus(&text, split)
}

fn head_fields(spec: &HeadSpec) -> (String, &str) {
    match spec {
        HeadSpec::Root(rel) => ("-1".into(), rel),
        HeadSpec::Head(h, rel) => (h.to_string(), rel),
        HeadSpec::Absent => ("_".into(), "_"),
    }
}

/// Renders one sentence block with the given argument tags in the gold columns.
pub fn format_sentence(sentence: &Sentence, tags: &BTreeMap<usize, Annotation>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "#id {}", sentence.id);
    let _ = writeln!(out, "#verb {}", sentence.verb_lemma);
    let _ = writeln!(out, "#parse {}", sentence.const_tree);
    for t in &sentence.tokens {
        let (bh, br) = head_fields(sentence.dep_basic.spec(t.index));
        let (ch, cr) = head_fields(sentence.dep_collapsed.spec(t.index));
        let (syn, sem) = if t.is_target_verb {
            ("v".to_string(), SemTag::VERB.to_string())
        } else {
            match tags.get(&t.index) {
                Some(a) => (a.syn.to_string(), a.sem.to_string()),
                None => (String::new(), String::new()),
            }
        };
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{bh}\t{br}\t{ch}\t{cr}\t{syn}\t{sem}",
            t.index, t.word, t.lemma, t.pos
        );
    }
    out
}

/// Renders a whole dataset with predictions; sentences without a prediction
/// keep only the verb row tagged.
pub fn format_predictions(dataset: &Dataset, predictions: &[SentencePrediction]) -> Result<String> {
    let by_id: BTreeMap<&str, &SentencePrediction> =
        predictions.iter().map(|p| (p.id.as_str(), p)).collect();
    for p in predictions {
        if dataset.get(&p.id).is_none() {
            return Err(Error::Prediction(format!("unknown sentence id {}", p.id)));
        }
    }
    let empty = BTreeMap::new();
    let mut out = String::new();
    for (k, s) in dataset.sentences.iter().enumerate() {
        let tags = by_id.get(s.id.as_str()).map(|p| &p.tags).unwrap_or(&empty);
        // Validates indices and rejects verb tags.
        s.with_arguments(tags)?;
        if k > 0 {
            out.push('\n');
        }
        out.push_str(&format_sentence(s, tags));
    }
    Ok(out)
}

pub fn write_predictions(
    dataset: &Dataset,
    predictions: &[SentencePrediction],
    path: impl AsRef<Path>,
) -> Result<()> {
    let text = format_predictions(dataset, predictions)?;
    write_atomic(path, text.as_bytes())
}

/// Result of [`split_by_verbs`]. `unmatched` lists requested dev verbs with
/// no sentences.
#[derive(Debug)]
pub struct VerbSplit {
    pub rest: Dataset,
    pub dev: Dataset,
    pub unmatched: Vec<String>,
}

/// Moves every sentence whose verb lemma is in `dev_verbs` into a dev set.
pub fn split_by_verbs(dataset: &Dataset, dev_verbs: &BTreeSet<String>) -> Result<VerbSplit> {
    if dev_verbs.is_empty() {
        return Err(Error::Resource("dev verb set is empty".into()));
    }
    let (dev, rest): (Vec<Sentence>, Vec<Sentence>) = dataset
        .sentences
        .iter()
        .cloned()
        .partition(|s| dev_verbs.contains(&s.verb_lemma));
    let present = dataset.verbs();
    let unmatched: Vec<String> = dev_verbs
        .iter()
        .filter(|v| !present.contains(v.as_str()))
        .cloned()
        .collect();
    for v in &unmatched {
        log::warn!("dev verb `{v}` matches no sentence");
    }
    Ok(VerbSplit {
        rest: Dataset {
            sentences: rest,
            split: dataset.split,
        },
        dev: Dataset {
            sentences: dev,
            split: Split::Dev,
        },
        unmatched,
    })
}
