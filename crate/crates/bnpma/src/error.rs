use thiserror::Error;

/// Crate-wide error type. `kind()` gives a stable machine-readable tag used
/// by the CLI's error JSON.
#[derive(Debug, Error)]
pub enum Error {
    #[error(
        "interval indices unidentifiable: n = {n} at confidence level {level} \
         cannot bound both tails at {half_alpha}"
    )]
    IntervalUnidentifiable { n: u32, level: f64, half_alpha: f64 },

    #[error("invalid quadruple for cohort {cohort}: {reason}")]
    InvalidQuadruple { cohort: String, reason: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::IntervalUnidentifiable { .. } => "interval_unidentifiable",
            Error::InvalidQuadruple { .. } => "invalid_quadruple",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::Config(_) => "config",
            Error::Data(_) => "data",
            Error::LinearAlgebra(_) => "linear_algebra",
            Error::Usage(_) => "usage",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
