use thiserror::Error;

use crate::kernel_algebra::MCEstimate;

/// Errors produced by the sampling, integration and experiment layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument `{field}`: {reason}")]
    InvalidArgument { field: &'static str, reason: String },

    #[error("contraction indices violate 0 <= l <= r <= min(p, q): p={p}, q={q}, r={r}, l={l}")]
    ContractionIndex { p: usize, q: usize, r: usize, l: usize },

    #[error("integral over an infinite control measure: {0}")]
    InfiniteMeasure(String),

    #[error("grid quadrature limited to {max} integrated coordinates, requested {requested}")]
    GridDimension { requested: usize, max: usize },

    #[error("unstable Monte Carlo estimate (relative standard error above 50%): {estimate}")]
    UnstableEstimate { estimate: MCEstimate },

    #[error("rejection envelope {envelope} is below the density value {value} at a probe point")]
    EnvelopeTooSmall { envelope: f64, value: f64 },

    #[error("kernel order {order} exceeds the enumeration bound {max}")]
    OrderTooLarge { order: usize, max: usize },

    #[error("point configuration carries no marks")]
    MissingMarks,

    #[error("all chaos levels are indistinguishable from zero (degenerate to order > {order})")]
    DegenerateRank { order: usize },

    #[error("integral diverges: {0}")]
    Divergent(String),

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("config error in field `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidArgument { field, reason: reason.into() }
}
