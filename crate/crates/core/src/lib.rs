//! Measuring language confusion in multilingual model outputs.
//!
//! The crate is organised along the measurement pipeline:
//!
//! - [`model`]: language tags, generation records, language distributions and
//!   labeled matrices shared by everything else.
//! - [`lid`]: line splitting, tokenization, a character n-gram language
//!   identifier and the line/word distribution builders.
//! - [`metrics`]: language confusion entropy, aggregation, pass rates,
//!   confusion matrices and Spearman rank correlation.
//! - [`typology`]: language graphs loaded from feature tables or embeddings,
//!   and the similarity matrices derived from them.
//! - [`divergence`]: column-wise KL divergence between a confusion matrix and
//!   a similarity matrix.
//!
//! Batch work goes through [`par::Execution`], which runs on rayon when the
//! `parallel` feature is enabled and falls back to plain iteration otherwise.

pub mod divergence;
pub mod lid;
pub mod metrics;
pub mod model;
pub mod par;
pub mod typology;

pub use model::{
    ExpectationSet, GenerationRecord, Granularity, LabeledMatrix, LanguageDistribution,
    LanguageTag, Setting, Task,
};
pub use par::Execution;
