use thiserror::Error;

/// Errors produced by the geometric routines and the witness engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("body has empty interior")]
    EmptyInterior,

    #[error("body is unbounded")]
    Unbounded,

    #[error("support function is unbounded in the requested direction")]
    UnboundedSupport,

    #[error("intersection is empty")]
    EmptyIntersection,

    #[error("{what} did not converge within {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("unsupported body: {0}")]
    UnsupportedBody(String),

    #[error("certificate check failed: {0}")]
    CertificateFailure(String),

    #[error("sum of inradii {sum} is not below 1")]
    InfeasibleSum { sum: f64 },

    #[error("invalid covering instance: {0}")]
    InvalidInstance(String),

    #[error("assignment space has {size} elements, above the exhaustive limit")]
    ProductTooLarge { size: u128 },

    #[error("witness failed validation: |x| = {norm}, margins = {margins:?}")]
    WitnessInvalid { norm: f64, margins: Vec<f64> },

    #[error("could not draw a non-degenerate cut after {retries} retries")]
    DegenerateCell { retries: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
