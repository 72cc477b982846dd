use thiserror::Error;

/// Errors raised by the approximation pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dyadic index: level {level}, shift {shift}")]
    InvalidIndex { level: i64, shift: i64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("function does not vanish on the boundary (|f| = {value:e} at {point:?})")]
    NotVanishing { point: Vec<f64>, value: f64 },

    #[error("quantizer chain broken at node {node}: function is outside the unit ball")]
    ChainBroken { node: usize },

    #[error("corrupt code: {0}")]
    CorruptCode(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("no feasible parameters: {0}")]
    Infeasible(String),

    #[error("cannot certify membership in the unit ball: {0}")]
    Certification(String),
}

pub type Result<T> = std::result::Result<T, Error>;
