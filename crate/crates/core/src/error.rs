use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter out of range: {0}")]
    InvalidParameter(String),

    #[error("invalid pmf: {0}")]
    InvalidPmf(String),

    #[error("tail bound {bound:e} not reachable below {target:e} within {max_len} entries")]
    TailUnreachable {
        bound: f64,
        target: f64,
        max_len: usize,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("series did not converge within {0} terms")]
    NonConvergence(usize),

    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
