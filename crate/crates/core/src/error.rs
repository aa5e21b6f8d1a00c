use serde::Serialize;
use thiserror::Error;

/// A root considered by an inverse solver, kept for diagnostics when it is rejected.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RejectedRoot {
    pub sin2theta: f64,
    pub branch: String,
    pub residual: f64,
    pub reason: String,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: entries ({row},{col}) and ({col},{row}) differ by {deviation:e}")]
    NotHermitian { row: usize, col: usize, deviation: f64 },

    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:e}")]
    NotPsd { eigenvalue: f64 },

    #[error("matrix has non-finite entry at ({row},{col})")]
    NonFinite { row: usize, col: usize },

    #[error("trace is {trace}, expected 1")]
    NotUnitTrace { trace: f64 },

    #[error("{name} = {value} outside [{lo}, {hi}]")]
    OutOfRange { name: &'static str, value: f64, lo: f64, hi: f64 },

    #[error("positivity bound violated: {bound} ({value} > {limit}, slack {slack:e})")]
    BoundViolation { bound: &'static str, value: f64, limit: f64, slack: f64 },

    #[error("density matrix is not X-shaped; offending entries: {entries:?}")]
    NotXShaped { entries: Vec<(usize, usize)> },

    #[error("parameters match no rank case; distances {distances:?}")]
    AmbiguousRank { distances: Vec<(String, f64)> },

    #[error("{0}")]
    Domain(String),

    #[error("{relation} needs `{input}`")]
    MissingInput { relation: &'static str, input: &'static str },

    #[error("infeasible target: {reason}")]
    Infeasible { reason: String, candidates: Vec<RejectedRoot> },

    #[error("internal consistency check failed: {what} (discrepancy {discrepancy:e})")]
    Consistency { what: String, discrepancy: f64 },

    #[error("sweep produced no feasible points")]
    EmptySweep,

    #[error("unknown relation `{0}`")]
    UnknownRelation(String),

    #[error("unknown figure {0}; expected 1..=10")]
    UnknownFigure(u32),

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn infeasible(reason: impl Into<String>, candidates: Vec<RejectedRoot>) -> Self {
        Error::Infeasible { reason: reason.into(), candidates }
    }

    /// True for errors that mean "the requested target has no realizing state",
    /// as opposed to malformed input.
    pub fn is_infeasible(&self) -> bool {
        matches!(self, Error::Infeasible { .. } | Error::Domain(_) | Error::EmptySweep)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
