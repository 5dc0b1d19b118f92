use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An intermediate value left the finite range of `f64`.
    #[error("value out of floating-point range: {0}")]
    RangeExceeded(String),

    #[error(
        "insufficient quadrature nodes: {requested} coefficients requested from {nodes} nodes"
    )]
    InsufficientNodes { requested: usize, nodes: usize },

    /// Doubling the node count moved the result by more than the tolerance.
    #[error("quadrature did not converge: {what} (base {base:.6e}, refined {refined:.6e})")]
    NonConvergent {
        what: String,
        base: f64,
        refined: f64,
    },

    #[error("wave vector must satisfy |k| > 1, got |k| = {0}")]
    BadWaveVector(f64),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("noise level {delta:e} must be below Q_v(lambda) = {q:e}")]
    DeltaTooLarge { delta: f64, q: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
