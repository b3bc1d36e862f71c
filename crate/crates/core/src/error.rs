//! Crate-wide error type.

use thiserror::Error;

/// Every failure mode the toolkit reports.
#[derive(Debug, Error)]
pub enum Error {
    /// A diagnosis string absent from the release year's label vocabulary.
    #[error("unknown diagnosis {label:?} for release year {year}")]
    UnknownDiagnosis { label: String, year: u16 },
    /// A release year outside the supported 2018/2019/2020 range.
    #[error("unsupported release year {0} (expected 2018, 2019, or 2020)")]
    UnknownYear(u16),
    /// Split ratios outside (0,1) or not summing to 1.
    #[error("invalid split ratios: {0}")]
    InvalidRatios(String),
    /// An operation that needs at least one sample got none.
    #[error("dataset is empty")]
    EmptyDataset,
    /// A degenerate or inconsistent synthetic-data or self-training spec.
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    /// Mismatched dimensions between two inputs.
    #[error("shape mismatch: {0}")]
    ShapeError(String),
    /// A class label at or beyond the declared class count.
    #[error("label {label} out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },
    /// Training loss became non-finite.
    #[error("training diverged at epoch {epoch}: loss is not finite")]
    DivergenceError { epoch: usize },
    /// Class counts unusable for a sampling schedule (majority count zero).
    #[error("degenerate class counts: {0}")]
    DegenerateCounts(String),
    /// The empty or full coalition was asked for a kernel weight; those are
    /// equality constraints, never weighted regression rows.
    #[error("coalition size {size} of {features} features is a constraint endpoint, not a weighted row")]
    ConstraintCoalition { size: usize, features: usize },
    /// Coalition budget too small, or full enumeration beyond the memory guard.
    #[error("coalition budget exceeded: {0}")]
    BudgetExceeded(String),
    /// Too few independent rows to determine the attribution solve.
    #[error("attribution system is rank deficient: {0}")]
    RankDeficient(String),
    /// AUC is undefined for the given truth assignment.
    #[error("AUC undefined: {0}")]
    UndefinedAUC(String),
    /// A macro average whose every per-class value is undefined.
    #[error("metric undefined: {0}")]
    UndefinedMetric(String),
    /// Prediction requested from a model that was never fitted.
    #[error("model has not been fitted")]
    Unfitted,
    /// A malformed experiment configuration; the message names the field.
    #[error("configuration error: {0}")]
    ConfigError(String),
    /// Two reports whose keys do not line up for comparison.
    #[error("report keys mismatch: {0}")]
    KeyError(String),
    /// Malformed file contents (CSV, PGM, weight dumps).
    #[error("parse error: {0}")]
    ParseError(String),
    /// An I/O failure tagged with the path it happened on.
    #[error("{path}: {source}")]
    FileIo {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Wraps an I/O error with the path it occurred on.
    pub fn file_io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::FileIo {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
