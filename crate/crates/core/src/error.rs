use thiserror::Error;

use crate::expr::{EvalError, ParseError};

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Eval(#[from] EvalError),

    #[error("evaluation failed at sample point {point:?}: {source}")]
    SampleEval { point: Vec<f64>, source: EvalError },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("t = {t} lies outside the trajectory range [{lo}, {hi}]")]
    Domain { t: f64, lo: f64, hi: f64 },

    /// `j` is 1-based, matching the `z<j>_<i>` symbol naming.
    #[error("delay g{j} violates gamma <= g(t) <= t at t = {t} (g{j}(t) = {value})")]
    DelayBound { j: usize, t: f64, value: f64 },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("overlap iteration did not converge at t = {t} after {halvings} step halvings")]
    OverlapDivergence { t: f64, halvings: u32 },

    #[error("solution became non-finite at t = {t}")]
    Blowup { t: f64 },

    #[error("{path}: {message}")]
    Schema { path: String, message: String },

    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn schema(path: impl Into<String>, message: impl std::fmt::Display) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
