//! Crate-wide error type.
//!
//! Admissibility guards are first-class citizens: every identity implemented
//! here is *false* outside the stated parameter region, so violations are
//! reported with the constraint spelled out rather than silently clamped.

use thiserror::Error;

/// Errors surfaced by samplers, passage-time kernels and verifiers.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violated a model's admissibility constraint. The message
    /// names the constraint (e.g. `SJ requires rho > p/(1-p)`).
    #[error("parameter error: {0}")]
    Parameter(String),

    /// A query left the sampled window / grid.
    #[error("domain error: {0}")]
    Domain(String),

    /// A Monte Carlo verifier refused to run (too few replicas, degenerate
    /// importance weights, or too many truncation-flagged samples).
    #[error("refusal: {0}")]
    Refusal(String),

    /// Configuration file problems (schema, duplicate streams, ...).
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Helper for admissibility violations.
    pub fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    /// Helper for out-of-window queries.
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Helper for verifier refusals.
    pub fn refusal(msg: impl Into<String>) -> Self {
        Error::Refusal(msg.into())
    }
}
