use std::io;

use thiserror::Error;

/// Errors produced by the sparse Tsetlin machine library.
#[derive(Debug, Error)]
pub enum StmError {
    #[error("no tokens")]
    NoTokens,

    #[error("feature index {index} out of range for {features} features")]
    FeatureOutOfRange { index: u32, features: u32 },

    #[error("class {class} out of range for {classes} classes")]
    ClassOutOfRange { class: u32, classes: u32 },

    #[error("indices must be strictly increasing ({prev} then {next})")]
    UnsortedIndices { prev: u32, next: u32 },

    #[error("empty dataset")]
    EmptyDataset,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("feature {0} is not present in the clause")]
    LiteralNotPresent(u32),

    #[error("state {state} outside the allowed spectrum [{lower}, {upper}]")]
    StateOutOfSpectrum { state: u32, lower: u32, upper: u32 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("binary problems require m=2 encoding")]
    SingleClass,

    #[error("corrupt model: {0}")]
    CorruptModel(String),

    #[error("unsupported model version {found} (this build reads version {expected})")]
    VersionMismatch { found: u32, expected: u32 },

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, StmError>;
