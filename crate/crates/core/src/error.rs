use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("points {left} and {right} are closer than the minimum gap {min_gap}")]
    DegeneratePoints { left: f64, right: f64, min_gap: f64 },

    #[error("points must be strictly increasing (got {left} before {right})")]
    UnorderedPoints { left: f64, right: f64 },

    #[error("at least one point is required")]
    EmptyPoints,

    #[error("function evaluated to a non-finite value {value} at x = {x}")]
    Evaluation { x: f64, value: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid intensity grid: {0}")]
    InvalidGrid(String),

    #[error("invalid channel parameters: {0}")]
    InvalidParams(String),

    #[error("invalid statistics: {0}")]
    InvalidStats(String),

    #[error("constraint system is infeasible (phase-one residual {residual:e})")]
    Infeasible { residual: f64 },

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid scenario: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
