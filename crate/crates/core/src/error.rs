use alloc::string::String;

use thiserror::Error;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown tag {0:?}")]
    UnknownTag(String),
    #[error("invalid token {0:?}: tokens must be non-empty and contain no whitespace")]
    InvalidToken(String),
    #[error("token/tag length mismatch: {tokens} tokens, {tags} tags")]
    LengthMismatch { tokens: usize, tags: usize },
    #[error("empty sentence")]
    EmptySentence,
    #[error("BIO violation at index {0}")]
    BioViolation(usize),
    #[error("empty gazetteer")]
    EmptyGazetteer,
    #[error("invalid postcode {0:?}: expected exactly 5 digits")]
    InvalidPostcode(String),
    #[error("house number {0} out of range 1..=999")]
    HouseNumberOutOfRange(u32),
    #[error("invalid pattern id {0}: expected 1..=6 (pattern 7 is lowercase duplication)")]
    InvalidPattern(u8),
    #[error("invalid generation config: {0}")]
    InvalidConfig(String),
    #[error("template rendered to zero tokens")]
    EmptyTemplate,
    #[error("template parse error: {0}")]
    Template(String),
    #[error("corpus too small: {size} sentences, need at least {min}")]
    CorpusTooSmall { size: usize, min: usize },
    #[error("split ratios must be non-negative and sum to 1, got {0:?}")]
    InvalidRatios([f64; 3]),
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("non-finite score at position {0}")]
    NonFiniteScore(usize),
    #[error("feature template version mismatch: model has {found}, expected {expected}")]
    FeatureVersionMismatch { found: u32, expected: u32 },
    #[error("corpora not aligned at sentence {index}: {reason}")]
    Alignment { index: usize, reason: String },
    #[error("confusion matrix is empty")]
    EmptyMatrix,
    #[error("confusion matrix fixture: {0}")]
    MatrixFormat(String),
}

pub type Result<T> = core::result::Result<T, Error>;
