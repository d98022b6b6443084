//! Dependency and constituency trees with the path and ancestry queries the
//! feature extractors need.

mod constituency;
mod dependency;

pub use constituency::{const_path, phrase_structure, phrase_type, ConstPath, ConstTree};
pub use dependency::{
    directed_dep_path, undirected_dep_path, DepPath, DepTree, Direction, HeadSpec,
    NodeAnnotation, PathStep,
};
