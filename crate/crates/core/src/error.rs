use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("K(k) diverges at k = 1")]
    Divergence,

    #[error("no {branch} branch at lambda = {lambda}")]
    NoBranch { branch: &'static str, lambda: f64 },

    #[error("region mismatch: expected {expected}, got {got}")]
    RegionMismatch { expected: &'static str, got: String },

    #[error("bracket failure in {0}")]
    Bracket(&'static str),

    #[error("quadrature did not converge (achieved {achieved:e})")]
    Quadrature { achieved: f64 },

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64, state: Vec<f64> },

    #[error("divergence at t = {t}")]
    Diverged { t: f64, state: Vec<f64> },

    #[error("newton failed after {iterations} iterations (best residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("finite-difference step failure: {0}")]
    FiniteDifference(String),

    #[error("frame mismatch: {0}")]
    Frame(String),

    #[error("invalid schedule: {0}")]
    Schedule(String),
}

pub type Result<T> = std::result::Result<T, Error>;
