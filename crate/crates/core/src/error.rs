use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("gate {0} is not a supported Clifford; use general conjugation")]
    UnsupportedGate(String),

    #[error("gate {0} carries a symbolic parameter; bind it first")]
    SymbolicParameter(String),

    #[error("term count {count} exceeds the configured cap {cap}")]
    TermCap { count: usize, cap: usize },

    #[error("result is not Hermitian: residual imaginary weight {0:e} on {1}")]
    NonHermitian(f64, String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("cache miss for {0}")]
    CacheMiss(String),

    #[error("outside cost-function domain: {0}")]
    OutOfDomain(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::Dimension { expected, actual })
    }
}
