use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("optimizer did not converge after {iterations} iterations (gradient norm {grad_norm:.3e})")]
    NonConvergence { iterations: usize, grad_norm: f64 },

    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("separation: |tau| = {tau:.3} exceeds bound {bound}")]
    Separation { tau: f64, bound: f64 },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("singular Hessian (condition number {cond:.3e})")]
    SingularHessian { cond: f64 },

    #[error("empty index set")]
    EmptySet,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("scenario failed: {failed} of {total} replications failed")]
    ScenarioFailed { failed: usize, total: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures caused by numerics rather than by user input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::Degenerate(_)
                | Error::Separation { .. }
                | Error::NotPositiveDefinite
                | Error::SingularHessian { .. }
                | Error::ScenarioFailed { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
