use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument {name} = {value} is outside the domain: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("{what} did not converge within {iterations} iterations")]
    NonConvergence { what: &'static str, iterations: usize },

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParams {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("quantile bracket failed for p = {p} after {doublings} doublings")]
    BracketFailure { p: f64, doublings: usize },

    #[error("out of regime: {0}")]
    OutOfRegime(String),

    #[error("grid too short: {0}")]
    GridTooShort(String),

    #[error("insufficient trials: {trials} trials with epsilon = {epsilon} (need trials*min(eps, 1-eps) >= 50)")]
    InsufficientTrials { trials: usize, epsilon: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
