//! The feature catalogue: named extractors turning a (token, sentence,
//! resources) triple into indicator and real-valued features.

mod catalogue;
mod extract;
mod subset;
mod vector;

pub use catalogue::FeatureName;
pub use extract::{check_resources, extract};
pub use subset::{FeatureSubset, Stage};
pub use vector::FeatureVector;
