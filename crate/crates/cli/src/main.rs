use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

mod commands;
mod config;

/// Corpus pattern analysis parser: finds a target verb's arguments and tags
/// them with syntactic functions and semantic classes.
#[derive(Parser, Debug)]
#[command(name = "cpa", version)]
pub struct Cli {
    /// `key = value` file supplying defaults for long options.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Check a corpus file against the format's invariants.
    Validate { corpus: PathBuf },

    /// Count how often each verb is immediately followed by each preposition.
    BuildPrepTable {
        /// Token stream: `word<TAB>lemma` rows or enriched corpus rows.
        corpus: PathBuf,
        /// One preposition per line.
        advprep_list: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Restrict counting to these verb lemmas (one per line).
        #[arg(long)]
        verbs: Option<PathBuf>,
    },

    /// Train the three classifiers and write a model directory.
    Train {
        #[arg(long)]
        train: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Feature subsets per stage (default: the bundled subsets).
        #[arg(long)]
        subsets: Option<PathBuf>,
        #[command(flatten)]
        maxent: MaxentArgs,
        #[command(flatten)]
        resources: ResourceArgs,
    },

    /// Hill-climbing feature selection for one stage.
    Select {
        #[arg(long)]
        stage: cpa_core::features::Stage,
        #[arg(long)]
        train: PathBuf,
        /// Dev corpus; alternatively carve one out of --train with --dev-verbs.
        #[arg(long, conflicts_with = "dev_verbs")]
        dev: Option<PathBuf>,
        /// Verb lemmas (one per line) whose sentences form the dev set.
        #[arg(long)]
        dev_verbs: Option<PathBuf>,
        /// Subsets file holding the initial subset (default: the bundled subsets).
        #[arg(long)]
        subsets: Option<PathBuf>,
        /// Candidate features, one per line (default: every other feature
        /// whose resources are loaded).
        #[arg(long)]
        pool: Option<PathBuf>,
        /// Where to write the updated subsets file (default: --subsets).
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Trace TSV (default: `<output>.trace.tsv`).
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Continue from an earlier trace of the same run.
        #[arg(long)]
        resume: Option<PathBuf>,
        /// Score the initial subset instead of starting from zero.
        #[arg(long)]
        eval_initial: bool,
        #[command(flatten)]
        maxent: MaxentArgs,
        #[command(flatten)]
        resources: ResourceArgs,
    },

    /// Annotate a corpus with a trained model.
    Predict {
        #[arg(long)]
        model: PathBuf,
        corpus: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        resources: ResourceArgs,
    },

    /// Per-verb precision, recall and F1 of predictions against gold.
    Score {
        gold: PathBuf,
        predicted: PathBuf,
        /// Count the target verb's own row as a tag.
        #[arg(long)]
        count_verb_row: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },

    /// Per-class breakdown, or plot data with --plot-data.
    Report {
        gold: PathBuf,
        predicted: PathBuf,
        /// Emit `class<TAB>frequency<TAB>f1` rows instead of tables.
        #[arg(long, requires = "train")]
        plot_data: bool,
        /// Training corpus for class frequencies.
        #[arg(long)]
        train: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Layer::Sem)]
        layer: Layer,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone)]
pub struct MaxentArgs {
    /// Gaussian prior width.
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value_t = 500)]
    max_iter: usize,
    /// Gradient-norm stopping threshold.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

#[derive(Args, Debug, Clone, Default)]
pub struct ResourceArgs {
    /// Word vectors in word2vec text format.
    #[arg(long)]
    embeddings: Option<PathBuf>,
    /// `lemma<TAB>pos<TAB>hypernym,...` lexicon.
    #[arg(long)]
    hypernyms: Option<PathBuf>,
    /// Table written by build-prep-table.
    #[arg(long)]
    verb_preps: Option<PathBuf>,
    /// Verbs that usually take a preposition, one per line.
    #[arg(long)]
    prep_verbs: Option<PathBuf>,
    #[arg(long)]
    similar_words: Option<usize>,
    #[arg(long)]
    similar_labels: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Tsv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layer {
    Syn,
    Sem,
}

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

fn parse_args() -> Result<Cli, clap::Error> {
    let mut args: Vec<OsString> = std::env::args_os().collect();
    if let Some(path) = config::config_path(&args) {
        let cmd = Cli::command();
        let text = std::fs::read_to_string(&path).map_err(|e| {
            cmd.clone().error(
                clap::error::ErrorKind::Io,
                format!("{}: {e}", PathBuf::from(&path).display()),
            )
        })?;
        args = config::parse_config(&text)
            .and_then(|c| config::merge_config(&cmd, args, &c))
            .map_err(|e| cmd.clone().error(clap::error::ErrorKind::InvalidValue, e))?;
    }
    Cli::try_parse_from(args)
}

fn main() -> ExitCode {
    let cli = match parse_args() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Some(n) = cli.jobs {
        if n == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(EXIT_USAGE);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("could not size the worker pool: {e}");
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_data_error() { EXIT_DATA } else { EXIT_INTERNAL })
        }
    }
}
