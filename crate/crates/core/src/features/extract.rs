use std::collections::BTreeSet;

use super::{FeatureName, FeatureVector};
use crate::corpus::Sentence;
use crate::error::{Error, Result};
use crate::resources::{hypernym_chain, Resources};
use crate::scalar::Scalar;
use crate::trees::{directed_dep_path, undirected_dep_path, NodeAnnotation};

use FeatureName as F;

const SENTENCE_START: &str = "<s>";
const SENTENCE_END: &str = "</s>";

const SUBJ_OBJ_RELATIONS: [&str; 3] = ["nsubj", "nsubjpass", "dobj"];
const PASSIVE_RELATIONS: [&str; 4] = ["nsubjpass", "csubjpass", "auxpass", "agent"];

/// Checks that every resource-backed feature in `subset` has its resource.
pub fn check_resources<T: Scalar>(subset: &BTreeSet<FeatureName>, res: &Resources<T>) -> Result<()> {
    for &f in subset {
        match f {
            F::HypernymsMcs | F::VerbHypernymsMcs if res.hypernyms.is_none() => {
                return Err(Error::MissingResource("hypernym lexicon"))
            }
            F::TokenSimilarWords | F::VerbSimilarWords if res.embeddings.is_none() => {
                return Err(Error::MissingResource("word embeddings"))
            }
            F::TokenMostSimilarLabels if res.embeddings.is_none() || res.labels.is_none() => {
                return Err(Error::MissingResource("word embeddings with a semantic class inventory"))
            }
            F::TokenMostSimilarLabels if res.labels.as_ref().is_some_and(|l| l.is_empty()) => {
                return Err(Error::MissingResource("semantic class inventory"))
            }
            F::VerbPreps if res.verb_preps.is_none() => {
                return Err(Error::MissingResource("verb-preposition table"))
            }
            F::IsVerbPrepositional
                if res.prepositional_verbs.as_ref().is_none_or(|v| v.is_empty()) =>
            {
                return Err(Error::MissingResource("prepositional verb list"))
            }
            _ => {}
        }
    }
    Ok(())
}

/// Extracts the enabled features for one token of a sentence.
pub fn extract<T: Scalar>(
    token: usize,
    sentence: &Sentence,
    resources: &Resources<T>,
    subset: &BTreeSet<FeatureName>,
) -> Result<FeatureVector<T>> {
    if token >= sentence.len() {
        return Err(Error::invariant(
            &sentence.id,
            format!("token index {token} out of range"),
        ));
    }
    check_resources(subset, resources)?;
    let cx = Context {
        s: sentence,
        tok: token,
        verb: sentence.verb_index(),
        res: resources,
    };
    let mut out = FeatureVector::new();
    for &f in subset {
        cx.emit(f, &mut out);
    }
    Ok(out)
}

struct Context<'a, T> {
    s: &'a Sentence,
    tok: usize,
    verb: usize,
    res: &'a Resources<T>,
}

fn is_capitalized(word: &str) -> bool {
    word.chars().next().is_some_and(char::is_uppercase)
}

fn is_uppercase(word: &str) -> bool {
    word.chars().any(char::is_alphabetic) && !word.chars().any(char::is_lowercase)
}

impl<T: Scalar> Context<'_, T> {
    fn lemma(&self, i: usize) -> &str {
        &self.s.tokens[i].lemma
    }

    fn pos(&self, i: usize) -> &str {
        &self.s.tokens[i].pos
    }

    fn around(&self, center: usize, field: impl Fn(usize) -> String) -> (String, String) {
        let prev = if center == 0 {
            SENTENCE_START.to_string()
        } else {
            field(center - 1)
        };
        let next = if center + 1 >= self.s.len() {
            SENTENCE_END.to_string()
        } else {
            field(center + 1)
        };
        (prev, next)
    }

    fn emit_around(&self, out: &mut FeatureVector<T>, name: &str, center: usize, field: impl Fn(usize) -> String) {
        let (prev, next) = self.around(center, field);
        out.indicator(&format!("{name}_prev"), prev);
        out.indicator(&format!("{name}_next"), next);
    }

    fn emit_directed(&self, out: &mut FeatureVector<T>, name: &str, from: Option<usize>, to: Option<usize>, annotate: NodeAnnotation) {
        let (Some(from), Some(to)) = (from, to) else {
            return;
        };
        if let Some(p) = directed_dep_path(&self.s.dep_collapsed, from, to, annotate, &self.s.tokens) {
            out.indicator(name, p.to_string());
        }
    }

    fn verb_vp_parent(&self) -> Option<usize> {
        self.s
            .dep_collapsed
            .first_verbal_ancestor(self.verb, &self.s.tokens)
    }

    fn emit(&self, f: FeatureName, out: &mut FeatureVector<T>) {
        let s = self.s;
        let tok = &s.tokens[self.tok];
        let verb = &s.tokens[self.verb];
        let coll = &s.dep_collapsed;
        let name = f.prefix();
        match f {
            F::TokenLemma => out.indicator(name, &tok.lemma),
            F::TokenWord => out.indicator(name, &tok.word),
            F::TokenPos => out.indicator(name, &tok.pos),
            F::LemmasAroundToken => self.emit_around(out, name, self.tok, |i| self.lemma(i).to_string()),
            F::WordsAroundToken => self.emit_around(out, name, self.tok, |i| s.tokens[i].word.clone()),
            F::PosAroundToken => self.emit_around(out, name, self.tok, |i| self.pos(i).to_string()),
            F::TokenIsVerb => out.flag(name, tok.pos.starts_with('V')),
            F::TokenIsPrepositionOfVerb => out.flag(
                name,
                s.dep_basic.parent(self.tok) == Some(self.verb)
                    && s.dep_basic.relation(self.tok) == Some("prep"),
            ),
            F::TokenPhraseType => {
                if let Some(p) = s.const_tree.phrase_type(self.tok) {
                    out.indicator(name, p);
                }
            }
            F::TokenPhraseStructure => {
                if let Some(p) = s.const_tree.phrase_structure(self.tok) {
                    out.indicator(name, p);
                }
            }
            F::TokenIsSubjOrObj => out.flag(
                name,
                coll.relation(self.tok)
                    .is_some_and(|r| SUBJ_OBJ_RELATIONS.contains(&r)),
            ),
            F::TokenIsVerbChild => out.flag(name, coll.parent(self.tok) == Some(self.verb)),
            F::TokenIsCapitalized => out.flag(name, is_capitalized(&tok.word)),
            F::TokenContainsDigit => out.flag(name, tok.word.chars().any(|c| c.is_ascii_digit())),
            F::TokenIsUppercase => out.flag(name, is_uppercase(&tok.word)),
            F::TokenRelFromVerb => {
                if coll.parent(self.tok) == Some(self.verb) {
                    if let Some(rel) = coll.relation(self.tok) {
                        out.indicator(name, rel);
                    }
                }
            }
            F::TokenIsUniqueSubjOrObj => {
                for rel in SUBJ_OBJ_RELATIONS {
                    if coll.relation(self.tok) == Some(rel) {
                        let holders = coll.arcs().filter(|&(_, _, r)| r == rel).count();
                        out.flag(&format!("{name}_{rel}"), holders == 1);
                    }
                }
            }
            F::VerbLemma => out.indicator(name, &verb.lemma),
            F::VerbPos => out.indicator(name, &verb.pos),
            F::LemmasAroundVerb => self.emit_around(out, name, self.verb, |i| self.lemma(i).to_string()),
            F::PosAroundVerb => self.emit_around(out, name, self.verb, |i| self.pos(i).to_string()),
            F::VerbVoice => {
                let passive = PASSIVE_RELATIONS
                    .iter()
                    .any(|r| coll.has_child_with_relation(self.verb, r));
                out.indicator(name, if passive { "passive" } else { "active" });
            }
            F::VerbPosition => {
                if self.tok != self.verb {
                    out.indicator(name, if self.tok < self.verb { "before" } else { "after" });
                }
            }
            F::IsVerbPrepositional => {
                let listed = self
                    .res
                    .prepositional_verbs
                    .as_ref()
                    .is_some_and(|v| v.contains(&verb.lemma));
                out.flag(name, listed);
            }
            F::VerbBy => out.flag(name, coll.has_child_with_relation(self.verb, "prep_by")),
            F::VerbPhraseStructure => {
                if let Some(p) = s.const_tree.phrase_structure(self.verb) {
                    out.indicator(name, p);
                }
            }
            F::VerbIsRoot => out.flag(name, coll.contains(self.verb) && coll.root() == self.verb),
            F::VerbHasNsubj => out.flag(name, coll.has_child_with_relation(self.verb, "nsubj")),
            F::VerbHasNsubjpass => out.flag(name, coll.has_child_with_relation(self.verb, "nsubjpass")),
            F::VerbHasDobj => out.flag(name, coll.has_child_with_relation(self.verb, "dobj")),
            F::VerbHasIobj => out.flag(name, coll.has_child_with_relation(self.verb, "iobj")),
            F::VerbHasCcomp => out.flag(name, coll.has_child_with_relation(self.verb, "ccomp")),
            F::VerbHasAcomp => out.flag(name, coll.has_child_with_relation(self.verb, "acomp")),
            F::VerbHasXcomp => out.flag(name, coll.has_child_with_relation(self.verb, "xcomp")),
            F::VerbParentLemma => {
                if let Some(p) = coll.parent(self.verb) {
                    out.indicator(name, self.lemma(p));
                }
            }
            F::VerbParentPos => {
                if let Some(p) = coll.parent(self.verb) {
                    out.indicator(name, self.pos(p));
                }
            }
            F::VerbFirstVpParentLemma => {
                if let Some(p) = self.verb_vp_parent() {
                    out.indicator(name, self.lemma(p));
                }
            }
            F::RelVerbParentToVerb => {
                if let Some(rel) = coll.relation(self.verb) {
                    out.indicator(name, rel);
                }
            }

            F::TokenDirDpathFromVerb => self.emit_directed(out, name, Some(self.verb), Some(self.tok), NodeAnnotation::None),
            F::TokenDirDpathFromVerbWithLemma => self.emit_directed(out, name, Some(self.verb), Some(self.tok), NodeAnnotation::Lemma),
            F::TokenDirDpathFromVerbWithPos => self.emit_directed(out, name, Some(self.verb), Some(self.tok), NodeAnnotation::Pos),
            F::TokenUndDpathFromVerb | F::TokenUndDpathFromVerbWithLemma | F::TokenUndDpathFromVerbWithPos => {
                let annotate = match f {
                    F::TokenUndDpathFromVerb => NodeAnnotation::None,
                    F::TokenUndDpathFromVerbWithLemma => NodeAnnotation::Lemma,
                    _ => NodeAnnotation::Pos,
                };
                // Tokens folded into collapsed arcs have no node to reach.
                if let Ok(p) = undirected_dep_path(coll, self.verb, self.tok, annotate, &s.tokens) {
                    out.indicator(name, p.to_string());
                }
            }
            F::DirDpathVerbVpParentToVerb => self.emit_directed(out, name, self.verb_vp_parent(), Some(self.verb), NodeAnnotation::None),
            F::DirDpathVerbVpParentToVerbWithLemma => self.emit_directed(out, name, self.verb_vp_parent(), Some(self.verb), NodeAnnotation::Lemma),
            F::DirDpathVerbVpParentToVerbWithPos => self.emit_directed(out, name, self.verb_vp_parent(), Some(self.verb), NodeAnnotation::Pos),
            F::TokenDirDpathFromVerbVpParent => self.emit_directed(out, name, self.verb_vp_parent(), Some(self.tok), NodeAnnotation::None),
            F::TokenDirDpathFromVerbVpParentWithLemma => self.emit_directed(out, name, self.verb_vp_parent(), Some(self.tok), NodeAnnotation::Lemma),
            F::TokenDirDpathFromVerbVpParentWithPos => self.emit_directed(out, name, self.verb_vp_parent(), Some(self.tok), NodeAnnotation::Pos),
            F::TokenParentDirDpathFromVerb => self.emit_directed(out, name, Some(self.verb), coll.parent(self.tok), NodeAnnotation::None),
            F::TokenParentDirDpathFromVerbWithLemma => self.emit_directed(out, name, Some(self.verb), coll.parent(self.tok), NodeAnnotation::Lemma),
            F::TokenParentDirDpathFromVerbWithPos => self.emit_directed(out, name, Some(self.verb), coll.parent(self.tok), NodeAnnotation::Pos),
            F::TokenDirDpathFromVerbParent => self.emit_directed(out, name, coll.parent(self.verb), Some(self.tok), NodeAnnotation::None),
            F::TokenDirDpathFromVerbParentWithLemma => self.emit_directed(out, name, coll.parent(self.verb), Some(self.tok), NodeAnnotation::Lemma),
            F::TokenDirDpathFromVerbParentWithPos => self.emit_directed(out, name, coll.parent(self.verb), Some(self.tok), NodeAnnotation::Pos),
            F::TokenCpathFromVerb => out.indicator(name, s.const_tree.path(self.verb, self.tok).to_string()),
            F::TokenCpathFromVerbParent => {
                if let Some(p) = coll.parent(self.verb) {
                    out.indicator(name, s.const_tree.path(p, self.tok).to_string());
                }
            }

            F::HypernymsMcs | F::VerbHypernymsMcs => {
                let Some(lex) = &self.res.hypernyms else { return };
                let t = if f == F::HypernymsMcs { tok } else { verb };
                for h in hypernym_chain(lex, &t.lemma, &t.pos) {
                    out.indicator(name, h);
                }
            }
            F::TokenSimilarWords | F::VerbSimilarWords => {
                let Some(store) = &self.res.embeddings else { return };
                let t = if f == F::TokenSimilarWords { tok } else { verb };
                for w in self.res.similar_words(store, &t.lemma).iter() {
                    out.indicator(name, w);
                }
            }
            F::TokenMostSimilarLabels => {
                let (Some(store), Some(labels)) = (&self.res.embeddings, &self.res.labels) else {
                    return;
                };
                for (class, _) in labels.most_similar(store, &tok.lemma, self.res.similar_labels) {
                    out.indicator(name, class);
                }
            }

            F::VerbPreps => {
                let Some(table) = &self.res.verb_preps else { return };
                if let Some(row) = table.probabilities(&verb.lemma) {
                    for (prep, &p) in row {
                        out.real(&format!("{name}_{prep}"), p);
                    }
                }
            }
            F::VerbDistance => out.real(name, T::from_count(self.tok.abs_diff(self.verb))),
            F::DepDepthDifference => {
                if let (Some(a), Some(b)) = (coll.depth(self.tok), coll.depth(self.verb)) {
                    out.real(name, T::from_count(a) - T::from_count(b));
                }
            }
            F::ConDepthDifference => {
                let (a, b) = (s.const_tree.depth(self.tok), s.const_tree.depth(self.verb));
                out.real(name, T::from_count(a) - T::from_count(b));
            }
            F::DepPathToVerbLength => {
                let path = coll
                    .directed_path(self.verb, self.tok)
                    .or_else(|| coll.directed_path(self.tok, self.verb));
                if let Some(p) = path {
                    out.real(name, T::from_count(p.len()));
                }
            }
            F::ConPathToVerbLength => {
                out.real(name, T::from_count(s.const_tree.path(self.verb, self.tok).len()))
            }
        }
    }
}
