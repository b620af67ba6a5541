use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide error type. Variants mirror the failure modes of the pipeline
/// stages, from file ingestion through classification.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: malformed row: {reason}")]
    MalformedRow {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("{path}:{line}: time values must be strictly increasing")]
    NonMonotoneTime { path: PathBuf, line: usize },

    #[error("missing phase sidecar file {path}")]
    MissingPhaseFile { path: PathBuf },

    #[error("phase {phase} holds fewer than two samples")]
    EmptyPhase { phase: String },

    #[error("invalid phase layout: {reason}")]
    BadPhaseLayout { reason: String },

    #[error("series has {got} samples, need at least {need}")]
    SeriesTooShort { got: usize, need: usize },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("calibration corpus is empty")]
    EmptyCorpus,

    #[error("calibration degenerate: {0}")]
    CalibrationDegenerate(String),

    #[error("empty label sequence")]
    EmptySequence,

    #[error("training data contains fewer than two classes")]
    SingleClass,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("model has not been trained")]
    UntrainedModel,

    #[error("forest has seen no samples")]
    UnfittedForest,

    #[error("invalid task profile: {0}")]
    InvalidProfile(String),

    #[error("bad model file: {0}")]
    BadModel(String),

    #[error("json error on {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    /// Wraps a lower-layer error with pipeline position (axis, phase, ...).
    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Tag an error with where in the pipeline it happened.
    pub fn in_context(self, context: impl Into<String>) -> Error {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
