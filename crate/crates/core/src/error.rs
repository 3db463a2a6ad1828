use thiserror::Error;

/// Every failure mode of the engine. Blow-up and positivity loss during a
/// flow are reported through [`crate::laplacian_flows::HaltReason`] instead,
/// because they are outcomes of a run rather than misuse of the API.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degree error: {0}")]
    Degree(String),

    #[error("metric error: {0}")]
    Metric(String),

    #[error("invalid Lie algebra: {0}")]
    InvalidAlgebra(String),

    #[error("3-form is not positive: {0}")]
    NotPositive(String),

    #[error("structure is not co-closed: |dψ| = {0:e}")]
    NotCoclosed(f64),

    #[error("invalid flow specification: {0}")]
    InvalidSpec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
