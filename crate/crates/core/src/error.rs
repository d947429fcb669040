use std::path::PathBuf;

/// Errors raised by the solvers, generators and experiment harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("rank deficient: {0}")]
    RankDeficient(String),

    #[error("column {0} is not part of the factorization")]
    UnknownColumn(usize),

    #[error("invalid sparsity k = {k} for a dictionary with {m} atoms")]
    InvalidSparsity { k: usize, m: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("target vector has zero norm")]
    ZeroTarget,

    #[error("invalid Babel order k = {k} (must lie in 1..={max})")]
    InvalidOrder { k: usize, max: usize },

    #[error("invalid instance spec: {0}")]
    InvalidSpec(String),

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("{path}: line {line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for failures of the numerical kind (as opposed to bad input or IO).
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::RankDeficient(_) | Error::NumericalBreakdown(_) | Error::UnknownColumn(_))
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
