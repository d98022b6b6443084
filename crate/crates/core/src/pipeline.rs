//! The three-stage parser: argument identification, then syntactic and
//! semantic classification of the accepted tokens.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::corpus::{Annotation, Dataset, Sentence, SentencePrediction, SemTag, SynTag};
use crate::error::{Error, Result};
use crate::features::{extract, FeatureName, FeatureSubset};
use crate::io::{read_to_string, write_atomic};
use crate::maxent::{self, LabeledExample, MaxentModel, TrainConfig};
use crate::resources::Resources;
use crate::scalar::Scalar;

pub use crate::features::Stage;

pub const ARGUMENT: &str = "argument";
pub const NONE: &str = "none";

const MANIFEST: &str = "manifest.txt";
const SUBSETS: &str = "subsets.txt";

fn model_file(stage: Stage) -> String {
    format!("{stage}.model")
}

/// Training examples for one stage. The target verb is never an example;
/// argid sees every other token, syn and sem only the gold arguments.
pub fn build_stage_data<T: Scalar>(
    dataset: &Dataset,
    stage: Stage,
    subset: &BTreeSet<FeatureName>,
    resources: &Resources<T>,
) -> Result<Vec<LabeledExample<T>>> {
    let per_sentence: Vec<Vec<LabeledExample<T>>> = dataset
        .sentences
        .par_iter()
        .map(|s| sentence_examples(s, stage, subset, resources))
        .collect::<Result<_>>()?;
    Ok(per_sentence.into_iter().flatten().collect())
}

fn sentence_examples<T: Scalar>(
    sentence: &Sentence,
    stage: Stage,
    subset: &BTreeSet<FeatureName>,
    resources: &Resources<T>,
) -> Result<Vec<LabeledExample<T>>> {
    let mut out = Vec::new();
    for token in &sentence.tokens {
        if token.is_target_verb {
            continue;
        }
        let label = match (stage, token.argument()) {
            (Stage::ArgId, Some(_)) => ARGUMENT.to_string(),
            (Stage::ArgId, None) => NONE.to_string(),
            (Stage::Syn, Some(a)) => a.syn.to_string(),
            (Stage::Sem, Some(a)) => a.sem.to_string(),
            (_, None) => continue,
        };
        let features = extract(token.index, sentence, resources, subset)?;
        out.push(LabeledExample::new(features, label));
    }
    Ok(out)
}

/// Three independently trained classifiers and the features each one uses.
#[derive(Clone, Debug, PartialEq)]
pub struct PipelineModel<T> {
    pub argid: MaxentModel<T>,
    pub syn: MaxentModel<T>,
    pub sem: MaxentModel<T>,
    pub subsets: FeatureSubset,
    /// Free-form `key = value` notes persisted in the manifest, such as the
    /// resource files used at training time.
    pub meta: BTreeMap<String, String>,
}

pub fn train_stage<T: Scalar>(
    train: &Dataset,
    stage: Stage,
    subset: &BTreeSet<FeatureName>,
    resources: &Resources<T>,
    config: &TrainConfig<T>,
) -> Result<MaxentModel<T>> {
    let examples = build_stage_data(train, stage, subset, resources)?;
    if examples.is_empty() {
        return Err(Error::Training(format!(
            "no {stage} training examples; the training data has no gold arguments"
        )));
    }
    log::info!("training {stage} on {} examples", examples.len());
    maxent::train(&examples, config)
        .map_err(|e| match e {
            Error::Training(m) => Error::Training(format!("{stage}: {m}")),
            other => other,
        })
}

pub fn train_pipeline<T: Scalar>(
    train: &Dataset,
    subsets: &FeatureSubset,
    resources: &Resources<T>,
    config: &TrainConfig<T>,
) -> Result<PipelineModel<T>> {
    if train.argument_count() == 0 {
        return Err(Error::Training(
            "training data has no gold argument tags".into(),
        ));
    }
    for stage in Stage::ALL {
        crate::features::check_resources(subsets.get(stage), resources)?;
    }
    Ok(PipelineModel {
        argid: train_stage(train, Stage::ArgId, &subsets.argid, resources, config)?,
        syn: train_stage(train, Stage::Syn, &subsets.syn, resources, config)?,
        sem: train_stage(train, Stage::Sem, &subsets.sem, resources, config)?,
        subsets: subsets.clone(),
        meta: BTreeMap::new(),
    })
}

impl<T: Scalar> PipelineModel<T> {
    pub fn stage(&self, stage: Stage) -> &MaxentModel<T> {
        match stage {
            Stage::ArgId => &self.argid,
            Stage::Syn => &self.syn,
            Stage::Sem => &self.sem,
        }
    }

    fn validate(&self) -> Result<()> {
        let argid: BTreeSet<&str> = self.argid.classes().iter().map(String::as_str).collect();
        if !argid.contains(ARGUMENT) || argid.iter().any(|c| *c != ARGUMENT && *c != NONE) {
            return Err(Error::Model(format!(
                "argid classes must be `{ARGUMENT}` and `{NONE}`"
            )));
        }
        for c in self.syn.classes() {
            match c.parse::<SynTag>() {
                Ok(SynTag::V) | Err(_) => {
                    return Err(Error::Model(format!("invalid syntactic class `{c}`")))
                }
                Ok(_) => {}
            }
        }
        for c in self.sem.classes() {
            if SemTag::new(c.as_str()).map_or(true, |t| t.is_verb()) {
                return Err(Error::Model(format!("invalid semantic class `{c}`")));
            }
        }
        Ok(())
    }

    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for stage in Stage::ALL {
            self.stage(stage).save(dir.join(model_file(stage)))?;
        }
        self.subsets.save(dir.join(SUBSETS))?;
        let mut manifest = String::new();
        for stage in Stage::ALL {
            manifest.push_str(&format!("{stage}_model = {}\n", model_file(stage)));
        }
        manifest.push_str(&format!("subsets = {SUBSETS}\n"));
        for (k, v) in &self.meta {
            manifest.push_str(&format!("meta.{k} = {v}\n"));
        }
        write_atomic(dir.join(MANIFEST), manifest.as_bytes())
    }

    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let mut files = BTreeMap::new();
        let mut meta = BTreeMap::new();
        for (i, line) in read_to_string(dir.join(MANIFEST))?.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(i + 1, "manifest line is not `key = value`"))?;
            let (k, v) = (k.trim().to_string(), v.trim().to_string());
            match k.strip_prefix("meta.") {
                Some(key) => meta.insert(key.to_string(), v),
                None => files.insert(k, v),
            };
        }
        let file = |key: &str| {
            files
                .get(key)
                .map(|f| dir.join(f))
                .ok_or_else(|| Error::Model(format!("manifest lacks `{key}`")))
        };
        let model = PipelineModel {
            argid: MaxentModel::load(file("argid_model")?)?,
            syn: MaxentModel::load(file("syn_model")?)?,
            sem: MaxentModel::load(file("sem_model")?)?,
            subsets: FeatureSubset::load(file("subsets")?)?,
            meta,
        };
        model.validate()?;
        Ok(model)
    }
}

/// Tags one sentence. Only tokens accepted by the argument identifier get
/// syntactic and semantic tags; the verb row is implicit.
pub fn annotate<T: Scalar>(
    model: &PipelineModel<T>,
    sentence: &Sentence,
    resources: &Resources<T>,
) -> Result<SentencePrediction> {
    let mut prediction = SentencePrediction::empty(sentence.id.clone());
    for token in &sentence.tokens {
        if token.is_target_verb {
            continue;
        }
        let fv = extract(token.index, sentence, resources, &model.subsets.argid)?;
        if model.argid.predict(&fv) != ARGUMENT {
            continue;
        }
        let syn_fv = extract(token.index, sentence, resources, &model.subsets.syn)?;
        let sem_fv = extract(token.index, sentence, resources, &model.subsets.sem)?;
        let syn = model.syn.predict(&syn_fv);
        let sem = model.sem.predict(&sem_fv);
        let syn: SynTag = syn
            .parse()
            .map_err(|e: String| Error::Prediction(e))?;
        let sem = SemTag::new(sem).map_err(Error::Prediction)?;
        if syn == SynTag::V || sem.is_verb() {
            return Err(Error::Prediction(format!(
                "classifier produced a verb tag in sentence {}",
                sentence.id
            )));
        }
        prediction.accepted.insert(token.index);
        prediction.tags.insert(token.index, Annotation::new(syn, sem));
    }
    Ok(prediction)
}

/// Annotates every sentence in parallel; output follows the dataset order.
pub fn annotate_all<T: Scalar>(
    model: &PipelineModel<T>,
    dataset: &Dataset,
    resources: &Resources<T>,
) -> Result<Vec<SentencePrediction>> {
    dataset
        .sentences
        .par_iter()
        .map(|s| annotate(model, s, resources))
        .collect()
}
