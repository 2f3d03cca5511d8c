use thiserror::Error;

/// Errors raised by construction and precondition checks across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("argument `{name}` must be strictly positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("argument `{name}` must be non-negative, got {value}")]
    Negative { name: &'static str, value: f64 },

    #[error("argument `{name}` must be finite, got {value}")]
    NotFinite { name: &'static str, value: f64 },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("function is not in the non-negative operator convex cone: {0}")]
    OutsideCone(String),

    #[error("the zero function is not admitted here")]
    ZeroFunction,

    #[error("function is not in the face F_{alpha}: {detail}")]
    NotInFace { alpha: String, detail: String },

    #[error("decomposition parameter out of range: {0}")]
    OutOfRange(String),

    #[error("matrix error: {0}")]
    Matrix(String),

    #[error("spectrum must lie in (0, infinity); found eigenvalue {0}")]
    SpectrumOutOfDomain(f64),

    #[error("invalid sample set: {0}")]
    InvalidSamples(String),

    #[error("fit did not reach KKT residual {tol} within {iterations} iterations (reached {reached})")]
    FitDidNotConverge {
        tol: f64,
        iterations: usize,
        reached: f64,
    },

    #[error("invalid interval: {0}")]
    InvalidInterval(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
