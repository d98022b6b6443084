use std::cmp::Ordering;
use std::collections::HashMap;
use std::io::BufRead;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Word vectors of a fixed dimension loaded from the word2vec text format.
#[derive(Clone, Debug)]
pub struct EmbeddingStore<T> {
    words: Vec<String>,
    index: HashMap<String, usize>,
    dim: usize,
    data: Vec<T>,
    norms: Vec<T>,
}

pub(crate) fn cosine<T: Scalar>(a: &[T], norm_a: T, b: &[T], norm_b: T) -> T {
    if norm_a == T::zero() || norm_b == T::zero() {
        return T::zero();
    }
    let dot: T = a.iter().zip(b).map(|(&x, &y)| x * y).sum();
    let c = dot / (norm_a * norm_b);
    // Rounding can push |c| slightly past 1.
    c.max(-T::one()).min(T::one())
}

pub(crate) fn norm<T: Scalar>(v: &[T]) -> T {
    v.iter().map(|&x| x * x).sum::<T>().sqrt()
}

/// Orders by cosine descending, then by name.
fn by_similarity<T: Scalar>(a: &(String, T), b: &(String, T)) -> Ordering {
    b.1.partial_cmp(&a.1)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.0.cmp(&b.0))
}

pub(crate) fn top_k<T: Scalar>(mut scored: Vec<(String, T)>, k: usize) -> Vec<(String, T)> {
    if scored.len() > k && k > 0 {
        scored.select_nth_unstable_by(k - 1, by_similarity);
        scored.truncate(k);
    }
    scored.sort_by(by_similarity);
    scored.truncate(k);
    scored
}

impl<T: Scalar> EmbeddingStore<T> {
    pub fn from_entries(entries: Vec<(String, Vec<T>)>) -> Result<Self> {
        let dim = entries.first().map_or(0, |e| e.1.len());
        let mut store = EmbeddingStore {
            words: Vec::with_capacity(entries.len()),
            index: HashMap::with_capacity(entries.len()),
            dim,
            data: Vec::with_capacity(entries.len() * dim),
            norms: Vec::with_capacity(entries.len()),
        };
        for (word, vec) in entries {
            store.push(word, vec).map_err(Error::Resource)?;
        }
        Ok(store)
    }

    fn push(&mut self, word: String, vec: Vec<T>) -> std::result::Result<(), String> {
        if vec.len() != self.dim {
            return Err(format!(
                "vector for `{word}` has {} values, expected {}",
                vec.len(),
                self.dim
            ));
        }
        if self.index.contains_key(&word) {
            return Err(format!("duplicate word `{word}`"));
        }
        self.index.insert(word.clone(), self.words.len());
        self.words.push(word);
        self.norms.push(norm(&vec));
        self.data.extend(vec);
        Ok(())
    }

    /// Reads the word2vec text format: a `count dim` header, then one
    /// `word v1 ... vd` line per entry.
    pub fn parse(reader: impl BufRead) -> Result<Self> {
        let mut lines = reader.lines().enumerate();
        let (count, dim) = loop {
            let Some((i, line)) = lines.next() else {
                return Err(Error::parse(1, "missing `count dim` header"));
            };
            let line = line.map_err(|e| Error::parse(i + 1, e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let count = parts.next().and_then(|c| c.parse::<usize>().ok());
            let dim = parts.next().and_then(|d| d.parse::<usize>().ok());
            match (count, dim, parts.next()) {
                (Some(c), Some(d), None) if d > 0 => break (c, d),
                _ => return Err(Error::parse(i + 1, "header must be `count dim`")),
            }
        };
        let mut store = EmbeddingStore {
            words: Vec::with_capacity(count),
            index: HashMap::with_capacity(count),
            dim,
            data: Vec::with_capacity(count * dim),
            norms: Vec::with_capacity(count),
        };
        for (i, line) in lines {
            let line = line.map_err(|e| Error::parse(i + 1, e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let word = parts.next().expect("non-empty line").to_string();
            let vec = parts
                .map(|v| {
                    v.parse::<T>()
                        .map_err(|_| Error::parse(i + 1, format!("bad value `{v}`")))
                })
                .collect::<Result<Vec<T>>>()?;
            store.push(word, vec).map_err(|m| Error::parse(i + 1, m))?;
        }
        if store.len() != count {
            return Err(Error::Resource(format!(
                "header announces {count} vectors, file has {}",
                store.len()
            )));
        }
        Ok(store)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    fn lookup(&self, word: &str) -> Option<usize> {
        self.index.get(&word.to_lowercase()).copied()
    }

    /// Vector for the lowercased form of `word`.
    pub fn get(&self, word: &str) -> Option<&[T]> {
        self.lookup(word).map(|i| self.row(i))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.lookup(word).is_some()
    }

    /// The `k` vocabulary words closest to `lemma` by cosine, excluding the
    /// query itself. Empty when the lemma is out of vocabulary.
    pub fn top_similar_words(&self, lemma: &str, k: usize) -> Vec<(String, T)> {
        let Some(q) = self.lookup(lemma) else {
            return Vec::new();
        };
        let (qv, qn) = (self.row(q), self.norms[q]);
        let scored = (0..self.len())
            .filter(|&i| i != q)
            .map(|i| {
                (
                    self.words[i].clone(),
                    cosine(qv, qn, self.row(i), self.norms[i]),
                )
            })
            .collect();
        top_k(scored, k)
    }

    /// Average of the vectors of the words making up a class name, split on
    /// spaces, underscores, hyphens and CamelCase boundaries and lowercased.
    /// Components missing from the vocabulary are skipped.
    pub fn class_vector(&self, class_name: &str) -> Option<Vec<T>> {
        let mut sum = vec![T::zero(); self.dim];
        let mut n = 0usize;
        for part in split_class_name(class_name) {
            if let Some(v) = self.get(&part) {
                for (s, &x) in sum.iter_mut().zip(v) {
                    *s = *s + x;
                }
                n += 1;
            }
        }
        if n == 0 {
            return None;
        }
        let n = T::from_count(n);
        Some(sum.into_iter().map(|s| s / n).collect())
    }
}

/// Splits `LexicalItem`, `Abstract Entity` or `TVProgram` into lowercased words.
pub fn split_class_name(name: &str) -> Vec<String> {
    let mut parts = Vec::new();
    for chunk in name.split(|c: char| c.is_whitespace() || c == '_' || c == '-') {
        let chars: Vec<char> = chunk.chars().collect();
        let mut start = 0;
        for i in 1..chars.len() {
            let (prev, cur) = (chars[i - 1], chars[i]);
            let next_lower = chars.get(i + 1).is_some_and(|c| c.is_lowercase());
            let boundary = cur.is_uppercase()
                && (prev.is_lowercase() || prev.is_ascii_digit() || (prev.is_uppercase() && next_lower));
            if boundary {
                parts.push(chars[start..i].iter().collect::<String>());
                start = i;
            }
        }
        if start < chars.len() {
            parts.push(chars[start..].iter().collect::<String>());
        }
    }
    parts
        .into_iter()
        .filter(|p| !p.is_empty())
        .map(|p| p.to_lowercase())
        .collect()
}

/// Precomputed class-name vectors for ranking semantic classes against a token.
#[derive(Clone, Debug)]
pub struct LabelIndex<T> {
    classes: Vec<(String, Vec<T>, T)>,
}

impl<T: Scalar> LabelIndex<T> {
    /// Classes whose name has no in-vocabulary component are left out.
    pub fn build<S: AsRef<str>>(store: &EmbeddingStore<T>, inventory: &[S]) -> Self {
        let classes = inventory
            .iter()
            .filter_map(|c| {
                let v = store.class_vector(c.as_ref())?;
                let n = norm(&v);
                Some((c.as_ref().to_string(), v, n))
            })
            .collect();
        LabelIndex { classes }
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Classes ranked by cosine with the token's vector; ties by name.
    pub fn most_similar(&self, store: &EmbeddingStore<T>, lemma: &str, k: usize) -> Vec<(String, T)> {
        let Some(v) = store.get(lemma) else {
            return Vec::new();
        };
        let vn = norm(v);
        let scored = self
            .classes
            .iter()
            .map(|(name, cv, cn)| (name.clone(), cosine(v, vn, cv, *cn)))
            .collect();
        top_k(scored, k)
    }
}

pub fn load_embeddings<T: Scalar>(path: impl AsRef<Path>) -> Result<EmbeddingStore<T>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    EmbeddingStore::parse(std::io::BufReader::new(file))
}

pub fn top_similar_words<T: Scalar>(store: &EmbeddingStore<T>, lemma: &str, k: usize) -> Vec<(String, T)> {
    store.top_similar_words(lemma, k)
}

pub fn class_vector<T: Scalar>(store: &EmbeddingStore<T>, class_name: &str) -> Option<Vec<T>> {
    store.class_vector(class_name)
}

/// Ranks `inventory` against `lemma`; returns class names only.
pub fn most_similar_labels<T: Scalar, S: AsRef<str>>(
    store: &EmbeddingStore<T>,
    lemma: &str,
    inventory: &[S],
    k: usize,
) -> Vec<String> {
    LabelIndex::build(store, inventory)
        .most_similar(store, lemma, k)
        .into_iter()
        .map(|(c, _)| c)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn store(text: &str) -> Result<EmbeddingStore<f64>> {
        EmbeddingStore::parse(text.as_bytes())
    }

    #[test]
    fn loads_small_file() {
        let s = store("2 3\ncat 1 0 0\ndog 0 1 0\n").unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.dim(), 3);
        assert_eq!(s.get("Cat"), Some(&[1.0, 0.0, 0.0][..]));
    }

    #[test]
    fn rejects_short_line_and_duplicates() {
        assert!(matches!(store("2 3\ncat 1 0 0\ndog 0 1\n"), Err(Error::Parse { line: 3, .. })));
        match store("2 2\ncat 1 0\ncat 0 1\n") {
            Err(e) => assert!(e.to_string().contains("cat"), "{e}"),
            Ok(_) => panic!("duplicate accepted"),
        }
        assert!(store("3 2\ncat 1 0\ndog 0 1\n").is_err());
        assert!(store("cat 1 0\n").is_err());
    }

    #[test]
    fn similar_words() {
        let s = store("3 2\ncat 1 0\nkitten 1 0\ndog 0 1\n").unwrap();
        let top = s.top_similar_words("cat", 5);
        assert_eq!(top[0], ("kitten".to_string(), 1.0));
        assert_eq!(top[1], ("dog".to_string(), 0.0));
        assert_eq!(top.len(), 2);
        assert!(s.top_similar_words("zebra", 5).is_empty());
        assert_eq!(s.top_similar_words("cat", 1).len(), 1);
    }

    #[test]
    fn class_name_splitting() {
        assert_eq!(split_class_name("LexicalItem"), vec!["lexical", "item"]);
        assert_eq!(split_class_name("Abstract Entity"), vec!["abstract", "entity"]);
        assert_eq!(split_class_name("State  Of  Affairs"), vec!["state", "of", "affairs"]);
        assert_eq!(split_class_name("TVProgram"), vec!["tv", "program"]);
        assert_eq!(split_class_name("Human"), vec!["human"]);
    }

    #[test]
    fn class_vectors() {
        let s = store("4 2\nabstract 1 0\nentity 0 1\nlexical 2 2\nitem 0 2\n").unwrap();
        assert_eq!(s.class_vector("Abstract Entity").unwrap(), vec![0.5, 0.5]);
        assert_eq!(s.class_vector("LexicalItem").unwrap(), vec![1.0, 2.0]);
        assert_eq!(s.class_vector("Human"), None);
        // Partially covered names use what is available.
        assert_eq!(s.class_vector("Abstract Thing").unwrap(), vec![1.0, 0.0]);
    }
}
