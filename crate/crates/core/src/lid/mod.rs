//! Language identification at line and word granularity.
//!
//! Responses are split into lines, lines into tokens, and every unit runs
//! through a [`DetectorChain`]. The built-in detector scores character
//! 1..4-grams against per-language [`DetectorProfile`]s; any other
//! [`Detector`] can be put in front of or behind it.

mod chain;
mod distribution;
mod ngram;
mod profile;
pub mod seed;
mod text;

pub use chain::{detect_unit, DetectionResult, Detector, DetectorChain};
pub use distribution::{
    build_all_distributions, build_distributions, build_line_distribution, build_word_distribution,
    RecordDistributions,
};
pub use ngram::{classify_ngram, ClassifyOptions, NgramClassifier, NgramDetector};
pub use profile::{
    profiles_to_json, read_profiles, train_profile, write_profiles, DetectorProfile,
    MIN_CORPUS_LETTERS,
};
pub use text::{is_majority_cjk, split_lines, tokenize};

use thiserror::Error;

use crate::model::LanguageTag;

/// Longest character n-gram used by the profiles.
pub const MAX_NGRAM: usize = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LidError {
    #[error("corpus for {lang} has {letters} letters, need at least {required}")]
    CorpusTooSmall {
        lang: LanguageTag,
        letters: usize,
        required: usize,
    },
    #[error("no profiles to classify against")]
    NoProfiles,
    #[error("more than one profile for {0}")]
    DuplicateProfile(LanguageTag),
    #[error("detector chain is empty")]
    EmptyChain,
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("profile file: {0}")]
    ProfileFormat(String),
    #[error("{0}")]
    Io(String),
}
