use thiserror::Error;

/// Errors produced by the model, the statistics and the formula evaluators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("edge from vertex {vertex} to itself is not allowed")]
    SelfLoop { vertex: usize },

    #[error("target vertex {target} is out of range for arrival {arrival}")]
    TargetOutOfRange { target: usize, arrival: usize },

    #[error("degree {k} is below the minimum degree {m}")]
    DegreeBelowMinimum { k: usize, m: usize },

    #[error("rejection sampler did not accept within {0} proposals")]
    SamplerStalled(usize),

    #[error("coefficient degenerate at factor (t = {t}, r = {r}) for degree {k}")]
    DegenerateCoefficient { k: usize, t: usize, r: usize },

    #[error("insufficient data: {have} replications, need at least {need}")]
    InsufficientData { have: usize, need: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
