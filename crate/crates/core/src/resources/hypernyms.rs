use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::io::read_to_string;

/// Coarse part of speech used to key the hypernym lexicon.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PosClass {
    Noun,
    Verb,
    Adjective,
    Adverb,
}

impl PosClass {
    /// Maps a Penn Treebank tag; closed-class tags have no lexicon entries.
    pub fn from_penn(tag: &str) -> Option<Self> {
        match tag.as_bytes().first()? {
            b'N' => Some(PosClass::Noun),
            b'V' => Some(PosClass::Verb),
            b'J' => Some(PosClass::Adjective),
            b'R' if tag.starts_with("RB") => Some(PosClass::Adverb),
            _ => None,
        }
    }

    pub fn from_code(code: &str) -> Option<Self> {
        match code {
            "n" | "noun" => Some(PosClass::Noun),
            "v" | "verb" => Some(PosClass::Verb),
            "a" | "s" | "adj" => Some(PosClass::Adjective),
            "r" | "adv" => Some(PosClass::Adverb),
            _ => None,
        }
    }
}

/// Inherited hypernyms of the most common sense of each (lemma, POS) pair,
/// most specific first, with the `entity` root left out.
#[derive(Clone, Debug, Default)]
pub struct HypernymLexicon {
    chains: HashMap<(String, PosClass), Vec<String>>,
}

pub const ROOT_CONCEPT: &str = "entity";

impl HypernymLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a sense; only the first sense given for a key is kept.
    pub fn insert(&mut self, lemma: &str, pos: PosClass, chain: Vec<String>) {
        let chain = chain.into_iter().filter(|h| h != ROOT_CONCEPT).collect();
        self.chains.entry((lemma.to_string(), pos)).or_insert(chain);
    }

    /// Parses `lemma<TAB>pos<TAB>h1,h2,...` rows. Repeated keys list further
    /// senses in frequency order and are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lex = HypernymLexicon::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(Error::parse(i + 1, "expected `lemma<TAB>pos<TAB>hypernyms`"));
            }
            let pos = PosClass::from_code(fields[1])
                .ok_or_else(|| Error::parse(i + 1, format!("unknown POS class `{}`", fields[1])))?;
            let chain = fields[2]
                .split(',')
                .map(str::trim)
                .filter(|h| !h.is_empty())
                .map(str::to_string)
                .collect();
            lex.insert(fields[0], pos, chain);
        }
        Ok(lex)
    }

    pub fn len(&self) -> usize {
        self.chains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chains.is_empty()
    }

    pub fn chain(&self, lemma: &str, pos: PosClass) -> &[String] {
        self.chains
            .get(&(lemma.to_string(), pos))
            .or_else(|| self.chains.get(&(lemma.to_lowercase(), pos)))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }
}

pub fn load_hypernyms(path: impl AsRef<Path>) -> Result<HypernymLexicon> {
    HypernymLexicon::parse(&read_to_string(path)?)
}

/// Hypernym chain for a lemma with a Penn POS tag; empty when unknown.
pub fn hypernym_chain<'a>(lexicon: &'a HypernymLexicon, lemma: &str, pos: &str) -> &'a [String] {
    match PosClass::from_penn(pos) {
        Some(class) => lexicon.chain(lemma, class),
        None => &[],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_sense_wins() {
        let lex = HypernymLexicon::parse(
            "university\tn\tbody,social_group,group,abstraction\n\
             university\tn\testablishment,structure\n",
        )
        .unwrap();
        assert_eq!(
            hypernym_chain(&lex, "university", "NNS"),
            ["body", "social_group", "group", "abstraction"]
        );
        assert!(hypernym_chain(&lex, "university", "VB").is_empty());
        assert!(hypernym_chain(&lex, "college", "NN").is_empty());
    }

    #[test]
    fn root_concept_dropped() {
        let lex = HypernymLexicon::parse("dog\tn\tcanine,animal,entity\n").unwrap();
        assert_eq!(lex.chain("dog", PosClass::Noun), ["canine", "animal"]);
    }

    #[test]
    fn malformed_rows() {
        assert!(HypernymLexicon::parse("dog\tn\n").is_err());
        assert!(HypernymLexicon::parse("dog\tx\tanimal\n").is_err());
    }

    #[test]
    fn penn_classes() {
        assert_eq!(PosClass::from_penn("VBD"), Some(PosClass::Verb));
        assert_eq!(PosClass::from_penn("JJR"), Some(PosClass::Adjective));
        assert_eq!(PosClass::from_penn("RB"), Some(PosClass::Adverb));
        assert_eq!(PosClass::from_penn("RP"), None);
        assert_eq!(PosClass::from_penn("IN"), None);
    }
}
