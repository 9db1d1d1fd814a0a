use thiserror::Error;

/// Error variants shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Shapes or dimensions of the inputs are inconsistent.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// An input contains NaN or infinite entries.
    #[error("input contains non-finite entries")]
    NonFinite,

    /// A matrix required to be positive semi-definite has an eigenvalue
    /// below the clamping tolerance.
    #[error("matrix is not positive semi-definite (min eigenvalue {min_eigenvalue:.3e}, tolerance {tolerance:.3e})")]
    NotPsd {
        min_eigenvalue: f64,
        tolerance: f64,
    },

    /// A covariance that must be strictly positive definite is numerically singular.
    #[error("covariance is numerically singular (min eigenvalue {min_eigenvalue:.3e})")]
    SingularCovariance { min_eigenvalue: f64 },

    /// A matrix claimed to be orthogonal fails the `QᵀQ = I` check.
    #[error("matrix is not orthogonal (max deviation from QᵀQ = I is {0:.3e})")]
    NotOrthogonal(f64),

    /// Measure weights are unusable: negative, non-finite, or summing to zero.
    #[error("infeasible weights: {0}")]
    InfeasibleWeights(String),

    /// An iterative solver hit its iteration cap before reaching tolerance.
    #[error("solver did not converge within {iterations} iterations (residual {residual:.3e})")]
    NotConverged { iterations: usize, residual: f64 },

    /// A numeric quantity overflowed or became non-finite inside a solver.
    #[error("numerical overflow in solver")]
    NumericalOverflow,

    /// Invariant violation that indicates a bug rather than bad input.
    #[error("internal solver failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
