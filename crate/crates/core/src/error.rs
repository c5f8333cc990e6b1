use thiserror::Error;

/// Errors raised across tableau synthesis, analysis, stability and integration.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the operation's domain (step count, node set, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// An invalid combination of options.
    #[error("usage error: {0}")]
    Usage(String),

    /// A tableau failed one of its construction invariants.
    #[error("invalid tableau: {0}")]
    Construction(String),

    #[error("analysis error: {0}")]
    Analysis(String),

    /// Root finding or another floating-point kernel failed to converge.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// An implicit step could not be solved.
    #[error("step {step} failed: {reason} (last residual {residual:e})")]
    Step {
        step: usize,
        residual: f64,
        reason: String,
    },

    #[error("configuration error: {0}")]
    Config(String),

    /// The convergence harness could not produce a slope.
    #[error("convergence harness failed at h = {h}: {reason}")]
    Harness { h: f64, reason: String },

    #[error("parse error on line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
