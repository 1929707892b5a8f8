use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no convergence: {0}")]
    NonConvergence(String),
    #[error("target {target} not enclosed by bracket values [{lo}, {hi}]")]
    Bracket { target: f64, lo: f64, hi: f64 },
    #[error("analyticity check failed: imaginary residue {residue:e} exceeds {threshold:e}")]
    Analyticity { residue: f64, threshold: f64 },
    #[error("Jørgensen parameter {lambda} not admissible for `{family}`")]
    Jorgensen { family: String, lambda: f64 },
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("matrix is not symmetric positive definite")]
    NotSpd,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("syntax error at byte {offset}: {message} (expected one of: {})", expected.join(", "))]
    Syntax {
        offset: usize,
        message: String,
        expected: Vec<String>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
