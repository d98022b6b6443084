//! Corpus pattern analysis parsing.
//!
//! Given a sentence with a marked target verb, a pipeline of three log-linear
//! classifiers finds the verb's argument tokens and tags each with a
//! syntactic function (`subj`, `obj`, ...) and a semantic class. The crate
//! covers corpus I/O, tree queries, lexical resources, feature extraction,
//! the classifier, hill-climbing feature selection and scoring.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix it to `f64`.

pub mod corpus;
pub mod error;
pub mod eval;
pub mod features;
pub mod io;
pub mod maxent;
pub mod pipeline;
pub mod resources;
pub mod scalar;
pub mod selection;
pub mod trees;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type FeatureVector = features::FeatureVector<f64>;
pub type MaxentModel = maxent::MaxentModel<f64>;
pub type PipelineModel = pipeline::PipelineModel<f64>;
pub type Resources = resources::Resources<f64>;
pub type EmbeddingStore = resources::EmbeddingStore<f64>;
pub type VerbPrepTable = resources::VerbPrepTable<f64>;
pub type EvalReport = eval::EvalReport<f64>;
pub type LayerStats = eval::LayerStats<f64>;
pub type SelectionRun = selection::SelectionRun<f64>;
