use std::fmt;
use std::str::FromStr;

use crate::error::Error;

macro_rules! catalogue {
    ($( $variant:ident => $prefix:literal ),* $(,)?) => {
        /// Every feature extractor in the catalogue.
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum FeatureName {
            $( $variant, )*
        }

        impl FeatureName {
            pub const ALL: &'static [FeatureName] = &[ $( FeatureName::$variant, )* ];

            /// CamelCase name used in subset files.
            pub fn as_str(self) -> &'static str {
                match self {
                    $( FeatureName::$variant => stringify!($variant), )*
                }
            }

            /// Name of the emitted indicator or real-valued feature.
            pub fn prefix(self) -> &'static str {
                match self {
                    $( FeatureName::$variant => $prefix, )*
                }
            }
        }

        impl FromStr for FeatureName {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $( stringify!($variant) => Ok(FeatureName::$variant), )*
                    other => Err(Error::UnknownFeature(other.to_string())),
                }
            }
        }
    };
}

catalogue! {
    TokenLemma => "token_lemma",
    TokenWord => "token_word",
    TokenPos => "token_pos",
    LemmasAroundToken => "lemmas_around_token",
    WordsAroundToken => "words_around_token",
    PosAroundToken => "pos_around_token",
    TokenIsVerb => "token_is_verb",
    TokenIsPrepositionOfVerb => "token_is_preposition_of_verb",
    TokenPhraseType => "token_phrase_type",
    TokenPhraseStructure => "token_phrase_strcture",
    TokenIsSubjOrObj => "token_is_subj_or_obj",
    TokenIsVerbChild => "token_is_verb_child",
    TokenIsCapitalized => "token_is_capitalized",
    TokenContainsDigit => "token_contains_digit",
    TokenIsUppercase => "token_is_uppercase",
    TokenRelFromVerb => "token_rel_from_verb",
    TokenIsUniqueSubjOrObj => "is_unique",
    VerbLemma => "verb_lemma",
    VerbPos => "verb_pos",
    LemmasAroundVerb => "lemmas_around_verb",
    PosAroundVerb => "pos_around_verb",
    VerbVoice => "verb_voice",
    VerbPosition => "verb_position",
    IsVerbPrepositional => "is_verb_prepositional",
    VerbBy => "verb_by",
    VerbPhraseStructure => "verb_phrase_structure",
    VerbIsRoot => "verb_is_root",
    VerbHasNsubj => "verb_has_nsubj",
    VerbHasNsubjpass => "verb_has_nsubjpass",
    VerbHasDobj => "verb_has_dobj",
    VerbHasIobj => "verb_has_iobj",
    VerbHasCcomp => "verb_has_ccomp",
    VerbHasAcomp => "verb_has_acomp",
    VerbHasXcomp => "verb_has_xcomp",
    VerbParentLemma => "verb_parent_lemma",
    VerbParentPos => "verb_parent_pos",
    VerbFirstVpParentLemma => "verb_first_vp_parent_lemma",
    RelVerbParentToVerb => "rel_verb_parent_to_verb",
    TokenDirDpathFromVerb => "token_dir_dpath_from_verb",
    TokenDirDpathFromVerbWithLemma => "token_dir_dpath_from_verb_with_lemma",
    TokenDirDpathFromVerbWithPos => "token_dir_dpath_from_verb_with_pos",
    TokenUndDpathFromVerb => "token_und_dpath_from_verb",
    TokenUndDpathFromVerbWithLemma => "token_und_dpath_from_verb_with_lemma",
    TokenUndDpathFromVerbWithPos => "token_und_dpath_from_verb_with_pos",
    DirDpathVerbVpParentToVerb => "dir_dpath_verb_vp_parent_to_verb",
    DirDpathVerbVpParentToVerbWithLemma => "dir_dpath_verb_vp_parent_to_verb_with_lemma",
    DirDpathVerbVpParentToVerbWithPos => "dir_dpath_verb_vp_parent_to_verb_with_pos",
    TokenDirDpathFromVerbVpParent => "token_dir_dpath_from_verb_vp_parent",
    TokenDirDpathFromVerbVpParentWithLemma => "token_dir_dpath_from_verb_vp_parent_with_lemma",
    TokenDirDpathFromVerbVpParentWithPos => "token_dir_dpath_from_verb_vp_parent_with_pos",
    TokenParentDirDpathFromVerb => "token_parent_dir_dpath_from_verb",
    TokenParentDirDpathFromVerbWithLemma => "token_parent_dir_dpath_from_verb_with_lemma",
    TokenParentDirDpathFromVerbWithPos => "token_parent_dir_dpath_from_verb_with_pos",
    TokenDirDpathFromVerbParent => "token_dir_dpath_from_verb_parent",
    TokenDirDpathFromVerbParentWithLemma => "token_dir_dpath_from_verb_parent_with_lemma",
    TokenDirDpathFromVerbParentWithPos => "token_dir_dpath_from_verb_parent_with_pos",
    TokenCpathFromVerb => "token_cpath_from_verb",
    TokenCpathFromVerbParent => "token_cpath_from_verb_parent",
    HypernymsMcs => "hypernyms_mcs",
    VerbHypernymsMcs => "verb_hypernyms_mcs",
    TokenSimilarWords => "token_similar_words",
    VerbSimilarWords => "verb_similar_words",
    TokenMostSimilarLabels => "token_most_similar_labels",
    VerbPreps => "verb_prep",
    VerbDistance => "verb_distance",
    DepDepthDifference => "dep_depth_difference",
    ConDepthDifference => "con_depth_difference",
    DepPathToVerbLength => "dep_path_to_verb_length",
    ConPathToVerbLength => "con_path_to_verb_length",
}

impl fmt::Display for FeatureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
