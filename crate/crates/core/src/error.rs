use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("invalid site specification: {0}")]
    Sites(String),
    #[error("operator is not Hermitian (max deviation {deviation:.3e} > tolerance {tolerance:.3e})")]
    NotHermitian { deviation: f64, tolerance: f64 },
    #[error("state is not normalized (norm {0:.12})")]
    NotNormalized(f64),
    #[error("iterative eigensolver did not converge (residual {residual:.3e})")]
    NoConvergence { residual: f64 },
    #[error("ground energy of H0 is {0:.3e}, expected 0; shift H0 before splitting")]
    GroundEnergyNotZero(f64),
    #[error("H0 is not positive semidefinite (lowest eigenvalue {0:.3e})")]
    NotPositive(f64),
    #[error("low-energy rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("polar factor is singular (smallest singular value {0:.3e})")]
    SingularPolar(f64),
    #[error("gadget condition '{name}' violated (residual {residual:.3e})")]
    Condition { name: String, residual: f64 },
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
