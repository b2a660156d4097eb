use thiserror::Error;

/// Errors raised by continued-fraction evaluation and the reference oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite coefficient at level {level}")]
    NonFiniteCoefficient { level: usize },

    #[error("zero denominator at level {level}")]
    ZeroDenominator { level: usize },

    #[error("x = {x} lies outside the domain {domain}")]
    Domain { x: f64, domain: String },

    #[error("invalid equivalence transform: p({k}) = {value}")]
    InvalidTransform { k: usize, value: f64 },

    #[error("continuant oracle supports depth <= {max}, got {depth}")]
    DepthOutOfRange { depth: usize, max: usize },

    #[error("no convergence within {depth} levels")]
    NoConvergence { depth: usize },

    #[error("oracle branches disagree: {primary} vs {check} (relative {relative:e})")]
    OracleMismatch {
        primary: f64,
        check: f64,
        relative: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
