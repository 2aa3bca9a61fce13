use thiserror::Error;

/// Failures raised by the computational modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiracError {
    #[error("singular energy: {0}")]
    SingularEnergy(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("recursion inconsistent at order {order}: relations give {first:e} and {second:e}")]
    RecursionInconsistent { order: usize, first: f64, second: f64 },

    #[error("no root: {0}")]
    NoRoot(String),

    #[error("quadrature failure: error estimate {estimate:e} exceeds tolerance {tolerance:e}")]
    QuadratureFailure { estimate: f64, tolerance: f64 },

    #[error("expansion fit failure: residual {residual:e} exceeds scale {scale:e}")]
    FitFailure { residual: f64, scale: f64 },
}

pub type Result<T> = std::result::Result<T, DiracError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(DiracError::Domain(msg.into()))
}
