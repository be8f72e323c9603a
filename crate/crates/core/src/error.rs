use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("size error: {what} = {got} exceeds the limit {limit}")]
    Size {
        what: &'static str,
        got: usize,
        limit: usize,
    },

    #[error("dimension mismatch: {left} qubits vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },

    #[error("infeasible configuration: extent {extent} does not exceed gamma {gamma}")]
    Infeasible { extent: f64, gamma: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("post-selection exhausted after {attempts} attempts (last norm gap {last_gap:.6e}, threshold {threshold:.6e})")]
    PostselectExhausted {
        attempts: usize,
        last_gap: f64,
        threshold: f64,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by an unusable parameter combination rather
    /// than by malformed input or I/O.
    pub fn is_infeasible(&self) -> bool {
        matches!(self, Error::Infeasible { .. } | Error::Config(_))
    }
}
