//! Lexical resources backing the semantic and real-valued features: word
//! embeddings, a hypernym lexicon, verb/preposition adjacency probabilities
//! and word lists.

mod embeddings;
mod hypernyms;
mod verb_preps;

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

pub use embeddings::{
    class_vector, load_embeddings, most_similar_labels, split_class_name, top_similar_words,
    EmbeddingStore, LabelIndex,
};
pub use hypernyms::{hypernym_chain, load_hypernyms, HypernymLexicon, PosClass, ROOT_CONCEPT};
pub use verb_preps::{
    build_verb_prep_table, parse_token_stream, read_token_stream, PrepCounts, VerbPrepTable,
};

use crate::corpus::{Dataset, SynTag};
use crate::scalar::Scalar;

/// Lowercased words tagged `advprep` anywhere in the dataset.
pub fn advprep_words_from(dataset: &Dataset) -> BTreeSet<String> {
    dataset
        .sentences
        .iter()
        .flat_map(|s| &s.tokens)
        .filter(|t| t.argument().is_some_and(|a| a.syn == SynTag::Advprep))
        .map(|t| t.word.to_lowercase())
        .collect()
}

/// Distinct semantic classes used on argument tokens, sorted.
pub fn semantic_classes_from(dataset: &Dataset) -> Vec<String> {
    dataset
        .sentences
        .iter()
        .flat_map(|s| &s.tokens)
        .filter_map(|t| t.argument().map(|a| a.sem.as_str().to_string()))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

pub const DEFAULT_SIMILAR_WORDS: usize = 50;
pub const DEFAULT_SIMILAR_LABELS: usize = 10;

/// Everything the feature extractors may consult besides the sentence.
/// Missing resources are only an error when a feature needing them is enabled.
pub struct Resources<T> {
    pub embeddings: Option<Arc<EmbeddingStore<T>>>,
    pub labels: Option<LabelIndex<T>>,
    pub hypernyms: Option<HypernymLexicon>,
    pub verb_preps: Option<VerbPrepTable<T>>,
    pub prepositional_verbs: Option<BTreeSet<String>>,
    pub similar_words: usize,
    pub similar_labels: usize,
    similar_cache: Mutex<HashMap<String, Arc<Vec<String>>>>,
}

impl<T> Default for Resources<T> {
    fn default() -> Self {
        Resources {
            embeddings: None,
            labels: None,
            hypernyms: None,
            verb_preps: None,
            prepositional_verbs: None,
            similar_words: DEFAULT_SIMILAR_WORDS,
            similar_labels: DEFAULT_SIMILAR_LABELS,
            similar_cache: Mutex::new(HashMap::new()),
        }
    }
}

impl<T: Scalar> Resources<T> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Installs the embeddings and precomputes class vectors for `inventory`.
    pub fn with_embeddings<S: AsRef<str>>(mut self, store: EmbeddingStore<T>, inventory: &[S]) -> Self {
        self.labels = Some(LabelIndex::build(&store, inventory));
        self.embeddings = Some(Arc::new(store));
        self.similar_cache.lock().expect("cache lock").clear();
        self
    }

    pub fn with_hypernyms(mut self, lexicon: HypernymLexicon) -> Self {
        self.hypernyms = Some(lexicon);
        self
    }

    pub fn with_verb_preps(mut self, table: VerbPrepTable<T>) -> Self {
        self.verb_preps = Some(table);
        self
    }

    pub fn with_prepositional_verbs(mut self, verbs: BTreeSet<String>) -> Self {
        self.prepositional_verbs = Some(verbs);
        self
    }

    /// Memoized nearest vocabulary words for a lemma.
    pub(crate) fn similar_words(&self, store: &EmbeddingStore<T>, lemma: &str) -> Arc<Vec<String>> {
        let key = lemma.to_lowercase();
        if let Some(hit) = self.similar_cache.lock().expect("cache lock").get(&key) {
            return Arc::clone(hit);
        }
        let words: Arc<Vec<String>> = Arc::new(
            store
                .top_similar_words(&key, self.similar_words)
                .into_iter()
                .map(|(w, _)| w)
                .collect(),
        );
        self.similar_cache
            .lock()
            .expect("cache lock")
            .insert(key, Arc::clone(&words));
        words
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{parse_corpus, Split};

    #[test]
    fn word_lists_from_training_data() {
        let d = parse_corpus(include_str!("../../fixtures/table1.conll"), Split::Train).unwrap();
        assert_eq!(advprep_words_from(&d), BTreeSet::from(["to".to_string()]));
        assert_eq!(semantic_classes_from(&d), vec!["Activity", "Human", "LexicalItem"]);
    }
}
