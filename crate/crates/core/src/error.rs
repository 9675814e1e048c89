use thiserror::Error;

/// Errors raised by the geometry and character layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("invalid chart domain: {0}")]
    Domain(String),

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("degree error: {0}")]
    Degree(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("integrand is matrix-valued (rank {0}); trace first")]
    MatrixIntegrand(usize),

    #[error("cycle has empty boundary")]
    EmptyBoundary,

    #[error("cycle is not closed: {0}")]
    NotClosed(String),

    #[error("cycle not trivialized")]
    NotTrivialized,

    #[error("structure mismatch: {0}")]
    Structure(String),

    #[error("singular gauge transformation at {0:?}")]
    SingularGauge(Vec<f64>),

    #[error("not unitary at {0:?}")]
    NotUnitary(Vec<f64>),

    #[error("loop leaves gauge region without a transition at {0:?}")]
    GaugeCrossing(Vec<f64>),

    #[error("period {value} on cycle #{cycle} is not integral")]
    NonIntegral { cycle: usize, value: f64 },

    #[error("missing derivative evaluator: {0}")]
    MissingDerivative(String),
}

pub type Result<T> = std::result::Result<T, Error>;
