use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },
    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },
    #[error("gaps are not commensurate: {0}")]
    NonCommensurate(String),
    #[error("annulus K < |s| <= 2K is empty for K = {k}")]
    EmptyAnnulus { k: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("Lie closure exceeded the dimension cap {cap}")]
    DimCap { cap: usize },
    #[error("matrix has zero Frobenius norm")]
    ZeroMatrix,
    #[error("all paired differences are zero")]
    AllZeroDifferences,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
