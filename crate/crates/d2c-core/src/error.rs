//! Crate error type.

use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A configuration value is out of range or internally inconsistent.
    Config(String),
    /// Lower bound of a sampling interval exceeds its upper bound.
    InvalidSizeInterval { lo: usize, hi: usize },
    /// An input series has (numerically) zero variance where nonzero is required.
    DegenerateInput(String),
    /// Input series lengths disagree or are too short for the estimator.
    BadSeries(String),
    /// Conditioning set too large relative to the sample count.
    IllPosedRegression { predictors: usize, samples: usize },
    /// Linear system remained singular even after the ridge fallback.
    SingularDesign,
    /// Simulation produced non-finite values and retries were exhausted.
    NonFinite(String),
    /// Not enough edges (or non-edges) among observed nodes to sample pairs.
    InsufficientPairs { requested: usize, available: usize, kind: &'static str },
    /// Hiding would leave too few observed columns.
    CannotHide(String),
    /// Training set labels contain a single class.
    SingleClass,
    /// Feature vector length differs from what the model expects.
    ArityMismatch { expected: usize, got: usize },
    /// An index does not refer to an observed column.
    BadIndex(String),
    /// The requested pair is not an edge of the ground-truth graph.
    NotAnEdge { i: usize, j: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Config(msg) => write!(f, "invalid configuration: {msg}"),
            Error::InvalidSizeInterval { lo, hi } => {
                write!(f, "invalid size interval: lower bound {lo} exceeds upper bound {hi}")
            }
            Error::DegenerateInput(what) => write!(f, "degenerate input: {what}"),
            Error::BadSeries(msg) => write!(f, "bad input series: {msg}"),
            Error::IllPosedRegression { predictors, samples } => write!(
                f,
                "ill-posed regression: {predictors} predictors for {samples} samples"
            ),
            Error::SingularDesign => write!(f, "singular design matrix (ridge fallback failed)"),
            Error::NonFinite(ctx) => write!(f, "non-finite values produced: {ctx}"),
            Error::InsufficientPairs { requested, available, kind } => write!(
                f,
                "cannot sample {requested} {kind} pairs: only {available} available among observed nodes"
            ),
            Error::CannotHide(msg) => write!(f, "cannot hide columns: {msg}"),
            Error::SingleClass => write!(f, "labels contain a single class"),
            Error::ArityMismatch { expected, got } => {
                write!(f, "feature arity mismatch: expected {expected}, got {got}")
            }
            Error::BadIndex(msg) => write!(f, "bad column index: {msg}"),
            Error::NotAnEdge { i, j } => {
                write!(f, "({i}, {j}) is not an edge of the ground-truth graph")
            }
        }
    }
}

impl core::error::Error for Error {}
