//! Language graphs and the similarity matrices built from them.
//!
//! A graph maps languages to one kind of representation: multivalued
//! categorical features (WALS, Grambank), binary feature sets
//! (colexifications) or dense embeddings. Similarity is Jaccard for the
//! first two and cosine for embeddings.

mod graph;
mod kernel;
mod load;
mod similarity;

pub use graph::{
    BinaryFeatureSet, Embedding, FeatureVector, GraphKind, Kernel, LanguageGraph, Representation,
};
pub use kernel::{angular_similarity, cosine_similarity, jaccard_similarity};
pub use load::{
    load_code_mapping, load_embedding_table, load_feature_table, parse_code_mapping,
    parse_embedding_table, parse_feature_table, CodeMapping,
};
pub use similarity::{build_similarity_matrix, SimilarityMatrix};

use thiserror::Error;

use crate::model::{LanguageTag, ModelError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TypologyError {
    #[error("{0}")]
    Io(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{lang}: feature {feature} given conflicting values")]
    DuplicateFeature { lang: LanguageTag, feature: String },
    #[error("{lang}: expected {expected} dimensions, found {found}")]
    DimensionMismatch {
        lang: LanguageTag,
        expected: usize,
        found: usize,
    },
    #[error("{0}: zero vector")]
    ZeroVector(LanguageTag),
    #[error("representations of different kinds")]
    KindMismatch,
    #[error("kernel {kernel} does not apply to {kind} graphs")]
    KernelMismatch { kernel: Kernel, kind: GraphKind },
    #[error("no requested language is present in graph {0}")]
    NoCoverage(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}
