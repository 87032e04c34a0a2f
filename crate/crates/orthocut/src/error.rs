use thiserror::Error;

/// Crate-wide error type.
///
/// The variants follow the failure taxonomy used throughout the API:
/// `Shape`/`Input` mean the caller handed us something malformed, `Infeasible`
/// and the two matrix-property variants mean the data is well-formed but
/// mathematically invalid, `Capacity` means a deliberately bounded routine
/// (brute force, dense PSD verification) was asked to exceed its size limit,
/// and `Numerical` flags an internal consistency check that failed at
/// runtime.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("matrix is not Hermitian: residual {residual:.3e} exceeds tolerance {tol:.1e}")]
    NotHermitian { residual: f64, tol: f64 },

    #[error("matrix is not positive semidefinite: lambda_min = {lambda_min:.6e}")]
    NotPsd { lambda_min: f64 },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
