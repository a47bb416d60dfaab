//! Shared data types.

pub mod codes;
mod distribution;
pub mod fmt;
mod matrix;
mod record;
mod tag;

pub use distribution::{merge_distributions, Granularity, LanguageDistribution};
pub use matrix::LabeledMatrix;
pub(crate) use record::same_language;
pub use record::{ExpectationSet, GenerationRecord, Setting, Task};
pub use tag::LanguageTag;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid ISO 639-3 code {0:?}")]
    InvalidLanguageCode(String),
    #[error("invalid ISO 15924 script {0:?}")]
    InvalidScriptCode(String),
    #[error("invalid {field}: {value:?}")]
    InvalidField { field: &'static str, value: String },
    #[error("record {id}: {reason}")]
    InconsistentSetting { id: String, reason: String },
    #[error("expectation set is empty")]
    EmptyExpectationSet,
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("distribution mass sums to {0}, expected 1")]
    MassDoesNotSumToOne(f64),
    #[error("every unit is unidentified")]
    AllUnidentified,
    #[error("empty input")]
    EmptyInput,
    #[error("distributions have mixed granularity")]
    MixedGranularity,
    #[error("{distributions} distributions but {weights} weights")]
    WeightCountMismatch {
        distributions: usize,
        weights: usize,
    },
    #[error("weights must be finite, non-negative and not all zero")]
    InvalidWeights,
    #[error("duplicate label {0}")]
    DuplicateLabel(LanguageTag),
    #[error("unknown label {0}")]
    UnknownLabel(LanguageTag),
    #[error("{rows}x{cols} matrix given {values} values")]
    MatrixShape {
        rows: usize,
        cols: usize,
        values: usize,
    },
    #[error("non-finite value at ({row}, {col})")]
    NonFiniteValue { row: usize, col: usize },
    #[error("csv line {line}: {message}")]
    CsvParse { line: usize, message: String },
}
