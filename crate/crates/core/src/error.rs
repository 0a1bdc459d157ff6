use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Rejected scenario or radio parameters.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("`{field}` must be strictly positive, got {value}")]
    NonPositive { field: &'static str, value: f64 },
    #[error("`{field}` = {value} is outside {expected}")]
    OutOfRange {
        field: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("scenario needs at least one node")]
    NoNodes,
    #[error(
        "p_opt = {p_opt} over {n} clustered nodes yields fewer than one expected cluster head"
    )]
    TooFewHeads { p_opt: f64, n: usize },
    #[error("advance-node election probability {0} exceeds 1")]
    ProbabilityAboveOne(f64),
    #[error("cannot aggregate runs with differing scenarios (run {index} differs from run 0)")]
    MixedConfigs { index: usize },
    #[error("cannot aggregate an empty set of runs")]
    NoRuns,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
