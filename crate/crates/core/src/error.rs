use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("argument outside supported domain: {0}")]
    Domain(String),
    #[error("no sign change on [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("eigenvector vanishes on {:.1}% of the sample grid", fraction * 100.0)]
    DegenerateVector { fraction: f64 },
    #[error("ground state of subdomain {0} is not simple")]
    DegenerateGroundState(usize),
    #[error("partition is not critical (residual {0:.3e})")]
    NotCritical(f64),
    #[error("eigenvalue crossing detected at t = {t:e} (overlap {overlap:.3})")]
    CrossingDetected { t: f64, overlap: f64 },
    #[error("search failed: {0}")]
    SearchFailed(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code: 2 for invalid input, 3 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidGeometry(_) | Error::Domain(_) | Error::Config(_) | Error::Io(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
