use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Evaluation on the diagonal `z = w`, where the Green's function has a
    /// logarithmic pole.
    #[error("singularity: {0}")]
    Singularity(String),

    #[error("no convergence: {0}")]
    Convergence(String),

    /// A quadrature node produced NaN or ±∞.
    #[error("non-finite integrand at node {node} (z = {re} + {im}i)")]
    NonFinite { node: usize, re: f64, im: f64 },

    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    /// The weighted moment `∫(1−|w|²)^{α+1} d|μ|` diverges.
    #[error("inadmissible measure: {0}")]
    Inadmissible(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
