use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use cpa_core::corpus::{read_corpus, split_by_verbs, write_predictions, Dataset, SentencePrediction, Split};
use cpa_core::eval::{
    class_frequencies, emit_report, per_class_breakdown, plot_data, score, ClassBreakdown, ReportFormat,
    ScoreOptions,
};
use cpa_core::features::{check_resources, FeatureName, FeatureSubset, Stage};
use cpa_core::io::{read_list, write_atomic};
use cpa_core::maxent::TrainConfig;
use cpa_core::pipeline::{annotate_all, train_pipeline, PipelineModel};
use cpa_core::resources::{build_verb_prep_table, read_token_stream, semantic_classes_from, HypernymLexicon};
use cpa_core::selection::{dev_score, read_trace, select_features, write_trace, SelectionOptions};
use cpa_core::{EmbeddingStore, Error, Resources, Result, VerbPrepTable};

use crate::{Cli, Cmd, Format, Layer, MaxentArgs, ResourceArgs};

fn require(paths: &[&Path]) -> Result<()> {
    for p in paths {
        if !p.exists() {
            return Err(Error::Resource(format!("{}: no such file or directory", p.display())));
        }
    }
    Ok(())
}

fn require_opt(paths: &[Option<&PathBuf>]) -> Result<()> {
    let present: Vec<&Path> = paths.iter().flatten().map(|p| p.as_path()).collect();
    require(&present)
}

impl MaxentArgs {
    fn config(&self) -> Result<TrainConfig<f64>> {
        if !(self.sigma > 0.0) || !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(Error::Training(
                "sigma, tol and max-iter must all be positive".into(),
            ));
        }
        Ok(TrainConfig {
            sigma: self.sigma,
            max_iterations: self.max_iter,
            tolerance: self.tol,
        })
    }
}

impl ResourceArgs {
    fn paths(&self) -> [Option<&PathBuf>; 4] {
        [
            self.embeddings.as_ref(),
            self.hypernyms.as_ref(),
            self.verb_preps.as_ref(),
            self.prep_verbs.as_ref(),
        ]
    }

    /// Fills unset paths from a model manifest.
    fn with_defaults(&self, meta: &BTreeMap<String, String>) -> ResourceArgs {
        let pick = |own: &Option<PathBuf>, key: &str| own.clone().or_else(|| meta.get(key).map(PathBuf::from));
        ResourceArgs {
            embeddings: pick(&self.embeddings, "embeddings"),
            hypernyms: pick(&self.hypernyms, "hypernyms"),
            verb_preps: pick(&self.verb_preps, "verb-preps"),
            prep_verbs: pick(&self.prep_verbs, "prep-verbs"),
            similar_words: self
                .similar_words
                .or_else(|| meta.get("similar-words").and_then(|v| v.parse().ok())),
            similar_labels: self
                .similar_labels
                .or_else(|| meta.get("similar-labels").and_then(|v| v.parse().ok())),
        }
    }

    fn record(&self, meta: &mut BTreeMap<String, String>) {
        let paths = [
            ("embeddings", &self.embeddings),
            ("hypernyms", &self.hypernyms),
            ("verb-preps", &self.verb_preps),
            ("prep-verbs", &self.prep_verbs),
        ];
        for (key, path) in paths {
            if let Some(p) = path {
                let p = std::fs::canonicalize(p).unwrap_or_else(|_| p.clone());
                meta.insert(key.into(), p.display().to_string());
            }
        }
        if let Some(k) = self.similar_words {
            meta.insert("similar-words".into(), k.to_string());
        }
        if let Some(k) = self.similar_labels {
            meta.insert("similar-labels".into(), k.to_string());
        }
    }

    /// Loads every named resource; `inventory` is the semantic class list
    /// used for label similarity.
    fn load(&self, inventory: &[String]) -> Result<Resources> {
        let mut res = Resources::new();
        if let Some(p) = &self.embeddings {
            log::info!("loading embeddings from {}", p.display());
            let f = File::open(p).map_err(|e| Error::Resource(format!("{}: {e}", p.display())))?;
            let store = EmbeddingStore::parse(BufReader::new(f))?;
            res = res.with_embeddings(store, inventory);
        }
        if let Some(p) = &self.hypernyms {
            res = res.with_hypernyms(HypernymLexicon::parse(&cpa_core::io::read_to_string(p)?)?);
        }
        if let Some(p) = &self.verb_preps {
            res = res.with_verb_preps(VerbPrepTable::load(p)?);
        }
        if let Some(p) = &self.prep_verbs {
            res = res.with_prepositional_verbs(read_list(p)?.into_iter().collect());
        }
        if let Some(k) = self.similar_words {
            res.similar_words = k;
        }
        if let Some(k) = self.similar_labels {
            res.similar_labels = k;
        }
        Ok(res)
    }
}

fn load_subsets(path: Option<&PathBuf>) -> Result<FeatureSubset> {
    match path {
        Some(p) => FeatureSubset::load(p),
        None => Ok(FeatureSubset::paper_default()),
    }
}

fn emit(text: &str, output: Option<&PathBuf>) -> Result<()> {
    match output {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Cmd::Validate { corpus } => validate(corpus),
        Cmd::BuildPrepTable {
            corpus,
            advprep_list,
            output,
            verbs,
        } => build_prep_table(corpus, advprep_list, output, verbs.as_ref()),
        Cmd::Train {
            train,
            output,
            subsets,
            maxent,
            resources,
        } => {
            require(&[train])?;
            require_opt(&[subsets.as_ref()])?;
            require_opt(&resources.paths())?;
            let config = maxent.config()?;
            let train = read_corpus(train, Split::Train)?;
            let subsets = load_subsets(subsets.as_ref())?;
            let res = resources.load(&semantic_classes_from(&train))?;
            let mut model = train_pipeline(&train, &subsets, &res, &config)?;
            resources.record(&mut model.meta);
            model.meta.insert("sigma".into(), maxent.sigma.to_string());
            model.meta.insert("max-iter".into(), maxent.max_iter.to_string());
            model.meta.insert("tol".into(), maxent.tol.to_string());
            model.meta.insert("sentences".into(), train.len().to_string());
            model.save(output)?;
            eprintln!(
                "trained on {} sentences; model written to {}",
                train.len(),
                output.display()
            );
            Ok(())
        }
        Cmd::Select { .. } => select(cli),
        Cmd::Predict {
            model,
            corpus,
            output,
            resources,
        } => {
            require(&[model, corpus])?;
            let model = PipelineModel::<f64>::load(model)?;
            let resources = resources.with_defaults(&model.meta);
            require_opt(&resources.paths())?;
            let dataset = read_corpus(corpus, Split::Test)?;
            let res = resources.load(model.sem.classes())?;
            let preds = annotate_all(&model, &dataset, &res)?;
            write_predictions(&dataset, &preds, output)
        }
        Cmd::Score {
            gold,
            predicted,
            count_verb_row,
            format,
        } => {
            let (gold, preds) = load_scoring_pair(gold, predicted)?;
            let options = ScoreOptions {
                count_verb_row: *count_verb_row,
            };
            let report = score::<f64>(&gold, &preds, options)?;
            let format = match format {
                Format::Text => ReportFormat::Text,
                Format::Tsv => ReportFormat::Tsv,
            };
            print!("{}", emit_report(&report, format));
            if format == ReportFormat::Text && !report.verbs.is_empty() {
                println!("\nscore: {:.3}", report.overall);
            }
            Ok(())
        }
        Cmd::Report {
            gold,
            predicted,
            plot_data: plot,
            train,
            layer,
            output,
        } => {
            require_opt(&[train.as_ref()])?;
            let (gold, preds) = load_scoring_pair(gold, predicted)?;
            let breakdown = per_class_breakdown::<f64>(&gold, &preds)?;
            let classes = match layer {
                Layer::Syn => &breakdown.syn,
                Layer::Sem => &breakdown.sem,
            };
            if *plot {
                let train = read_corpus(train.as_ref().expect("clap enforces --train"), Split::Train)?;
                let (syn_freq, sem_freq) = class_frequencies(&train);
                let freq = if *layer == Layer::Syn { syn_freq } else { sem_freq };
                emit(&plot_data(classes, &freq), output.as_ref())
            } else {
                emit(&breakdown_table(&breakdown), output.as_ref())
            }
        }
    }
}

fn validate(corpus: &Path) -> Result<()> {
    require(&[corpus])?;
    let d = read_corpus(corpus, Split::Train)?;
    println!(
        "{}: {} sentences, {} verbs, {} argument tags",
        corpus.display(),
        d.len(),
        d.verbs().len(),
        d.argument_count()
    );
    Ok(())
}

fn build_prep_table(corpus: &Path, advprep: &Path, output: &Path, verbs: Option<&PathBuf>) -> Result<()> {
    require(&[corpus, advprep])?;
    require_opt(&[verbs])?;
    let stream = read_token_stream(corpus)?;
    let preps: BTreeSet<String> = read_list(advprep)?.into_iter().collect();
    let verbs: Option<BTreeSet<String>> = verbs.map(read_list).transpose()?.map(|v| v.into_iter().collect());
    let table: VerbPrepTable = build_verb_prep_table(&stream, &preps, verbs.as_ref())?;
    table.save(output)?;
    eprintln!(
        "{} sentences, {} verbs written to {}",
        stream.len(),
        table.verbs().count(),
        output.display()
    );
    Ok(())
}

fn load_scoring_pair(gold: &Path, predicted: &Path) -> Result<(Dataset, Vec<SentencePrediction>)> {
    require(&[gold, predicted])?;
    let gold = read_corpus(gold, Split::Test)?;
    let predicted = read_corpus(predicted, Split::Test)?;
    Ok((gold, SentencePrediction::from_dataset(&predicted)))
}

fn breakdown_table(b: &ClassBreakdown<f64>) -> String {
    let mut out = String::new();
    for (name, classes) in [("syntactic", &b.syn), ("semantic", &b.sem)] {
        let width = classes.keys().map(|k| k.len()).chain([5]).max().unwrap_or(5);
        out.push_str(&format!("{name} classes\n"));
        out.push_str(&format!(
            "{:<width$}  {:>5}  {:>6}  {:>6}  {:>6}\n",
            "class", "ref", "P", "R", "F"
        ));
        for (class, s) in classes {
            out.push_str(&format!(
                "{class:<width$}  {:>5}  {:>6.3}  {:>6.3}  {:>6.3}\n",
                s.reference, s.precision, s.recall, s.f1
            ));
        }
        out.push('\n');
    }
    out
}

fn select(cli: &Cli) -> Result<()> {
    let Cmd::Select {
        stage,
        train,
        dev,
        dev_verbs,
        subsets,
        pool,
        output,
        trace,
        resume,
        eval_initial,
        maxent,
        resources,
    } = &cli.command
    else {
        unreachable!()
    };
    require(&[train])?;
    require_opt(&[dev.as_ref(), dev_verbs.as_ref(), subsets.as_ref(), pool.as_ref(), resume.as_ref()])?;
    require_opt(&resources.paths())?;
    let output = output
        .clone()
        .or_else(|| subsets.clone())
        .ok_or_else(|| Error::Selection("give --output or --subsets to say where the result goes".into()))?;
    let trace_path = trace.clone().unwrap_or_else(|| {
        let mut name = output.clone().into_os_string();
        name.push(".trace.tsv");
        PathBuf::from(name)
    });
    let config = maxent.config()?;
    let mut all_subsets = load_subsets(subsets.as_ref())?;
    let initial = all_subsets.get(*stage).clone();

    let full = read_corpus(train, Split::Train)?;
    let (train_set, dev_set) = match (dev, dev_verbs) {
        (Some(d), _) => (full, read_corpus(d, Split::Dev)?),
        (None, Some(v)) => {
            let verbs: BTreeSet<String> = read_list(v)?.into_iter().collect();
            let split = split_by_verbs(&full, &verbs)?;
            (split.rest, split.dev)
        }
        (None, None) => {
            return Err(Error::Selection("a dev set is required: pass --dev or --dev-verbs".into()))
        }
    };
    let res = resources.load(&semantic_classes_from(&train_set))?;

    let candidates: BTreeSet<FeatureName> = match pool {
        Some(p) => read_list(p)?
            .iter()
            .map(|s| s.parse())
            .collect::<Result<_>>()?,
        None => FeatureName::ALL
            .iter()
            .copied()
            .filter(|f| !initial.contains(f))
            .filter(|f| check_resources(&BTreeSet::from([*f]), &res).is_ok())
            .collect(),
    };
    let options = SelectionOptions {
        eval_initial: *eval_initial,
        resume: resume.as_ref().map(read_trace).transpose()?.unwrap_or_default(),
    };
    let evaluator = |s: &BTreeSet<FeatureName>| dev_score(*stage, s, &train_set, &dev_set, &res, &config);
    let run = match select_features(*stage, &initial, &candidates, evaluator, cli.seed, &options) {
        Ok(run) => run,
        Err(failure) => {
            write_trace(&failure.partial.trace, &trace_path)?;
            eprintln!("partial trace written to {}", trace_path.display());
            return Err(failure.source);
        }
    };
    write_trace(&run.trace, &trace_path)?;
    *all_subsets.get_mut(*stage) = run.selected.clone();
    all_subsets.save(&output)?;
    eprintln!(
        "{}: kept {} of {} candidates, best dev score {:.4} (seed {})",
        Stage::as_str(*stage),
        run.selected.len() - initial.len(),
        candidates.len(),
        run.best,
        cli.seed
    );
    Ok(())
}
