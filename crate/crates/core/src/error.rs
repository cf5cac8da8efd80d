use alloc::string::String;

use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("bit vector width mismatch: {left} vs {right}")]
    WidthMismatch { left: usize, right: usize },

    #[error("vertex {index} out of range for a graph on {n} vertices")]
    VertexOutOfRange { index: usize, n: usize },

    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),

    #[error("representation covers {found} vertices but the graph has {expected}")]
    VertexCountMismatch { expected: usize, found: usize },

    #[error("width k must be at least 1")]
    ZeroWidth,

    #[error("threshold t={t} must be strictly below width k={k}")]
    ThresholdTooLarge { k: usize, t: usize },

    #[error("this encoding requires threshold 0, got {0}")]
    NonZeroThreshold(usize),

    #[error("vertices {a} and {b} share a type but disagree on mutual adjacency")]
    InconsistentType { a: usize, b: usize },

    #[error("cycle cap must be at least 2, got {0}")]
    CycleCapTooSmall(usize),

    #[error("type {ty} needs {need} vertices but only {have} are available")]
    CapacityExceeded { ty: usize, need: usize, have: usize },

    #[error("instance exceeds the exhaustive-search guard: {0}")]
    SizeGuard(String),

    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("invalid formula: {0}")]
    InvalidFormula(String),

    #[error("invalid type space: {0}")]
    InvalidTypeSpace(String),

    #[error("internal inconsistency: {0}")]
    Internal(String),
}
