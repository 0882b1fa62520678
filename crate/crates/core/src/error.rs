use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::ilp::SolverError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{}:{line}:{column}: `{token}` is not an unsigned integer item", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        token: String,
    },

    #[error("{}: no transactions", path.display())]
    EmptyDatabase { path: PathBuf },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("nothing to hide: no sensitive itemset is frequent")]
    NothingToHide,

    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),

    #[error("duplicate algorithm id `{0}`")]
    DuplicateAlgorithm(String),

    #[error("invalid sanitization plan: {0}")]
    PlanValidity(String),

    #[error("external algorithm `{id}` failed: {message}")]
    ExternalAlgorithm { id: String, message: String },

    #[error("algorithm `{id}` left sensitive itemset {itemset} with support {support} (threshold {sigma_min})")]
    HidingIncomplete {
        id: String,
        itemset: String,
        support: u32,
        sigma_min: u32,
    },

    #[error("integrity violation: {0}")]
    Integrity(String),

    #[error("requested {requested} sensitive itemsets but only {available} eligible frequent itemsets exist")]
    InsufficientItemsets { requested: usize, available: usize },

    #[error("unknown plot axis `{0}` (expected changes, side-effects, cpu-time or information-loss)")]
    UnknownAxis(String),

    #[error(transparent)]
    Solver(#[from] SolverError),

    #[error("report serialization: {0}")]
    Report(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
