use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("graph has {n} vertices; this operation supports at most {max}")]
    TooManyVertices { n: usize, max: usize },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "rejection sampling found no triangle-free graph in {tries} tries \
         (empirical rejection rate {rejection_rate})"
    )]
    RejectionExhausted { tries: u64, rejection_rate: f64 },

    #[error("derivative mismatch at x = {x}: closed form {closed}, finite difference {numeric}")]
    DerivativeMismatch { x: f64, closed: f64, numeric: f64 },

    #[error("no sign change found in [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("inconsistency: {0}")]
    Inconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
