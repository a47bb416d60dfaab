//! Language confusion entropy, pass rates, confusion matrices and rank
//! correlation.

mod aggregate;
mod confusion;
mod entropy;
mod passrate;
mod spearman;

pub use aggregate::{aggregate_entropy, AggregateField, AggregateKey, AggregateRow};
pub use confusion::build_confusion_matrix;
pub use entropy::{
    confusion_entropy, EntropyOptions, EntropyResult, LogBase, ZeroConvention, CLAMP_EPSILON,
};
pub use passrate::{
    is_line_error, is_word_error, line_pass_rate, word_pass_rate, PassRateInput, PassReference,
    WprMode,
};
pub use spearman::{average_ranks, spearman, spearman_with, stars, Correlation, PValueMethod};

use thiserror::Error;

use crate::model::ModelError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("distribution is not normalized (identified mass {0})")]
    UnnormalizedDistribution(f64),
    #[error("empty input")]
    EmptyInput,
    #[error("no record passes the line level")]
    NoLinePassers,
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("exact permutation test needs n <= {max}, got {n}")]
    ExactTooLarge { n: usize, max: usize },
    #[error("aggregation key has no fields")]
    EmptyKey,
    #[error(transparent)]
    Model(#[from] ModelError),
}
