use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric parameter violates its constraint. `constraint` names the
    /// rule that failed, e.g. "beta must exceed d".
    #[error("invalid parameter {field} = {value}: {constraint}")]
    InvalidParameter {
        field: &'static str,
        value: f64,
        constraint: String,
    },

    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    #[error("field sample is already scaled; refusing to scale twice")]
    AlreadyScaled,

    #[error("empty sample passed to {0}")]
    EmptySample(&'static str),

    #[error("sample too small for {op}: need at least {need}, got {got}")]
    SampleTooSmall {
        op: &'static str,
        need: usize,
        got: usize,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(field: &'static str, value: f64, constraint: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            value,
            constraint: constraint.into(),
        }
    }
}
