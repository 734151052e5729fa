use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the feature-selection pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("row {row}: expected {expected} columns, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("row {row}, column {column}: cannot parse {value:?} as a number")]
    ParseCell {
        row: usize,
        column: usize,
        value: String,
    },

    #[error("label column {column} out of range for {width} columns")]
    LabelColumn { column: usize, width: usize },

    #[error("dataset has a single class; classification needs at least two")]
    SingleClass,

    #[error("k = {k} exceeds training set size {train}")]
    KTooLarge { k: usize, train: usize },

    #[error("mask length {found} does not match feature count {expected}")]
    MaskLength { expected: usize, found: usize },

    #[error("mask selects no features")]
    EmptyMask,

    #[error("config: {0}")]
    Config(String),

    #[error("run with seed {seed} failed: {source}")]
    Run {
        seed: u64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
