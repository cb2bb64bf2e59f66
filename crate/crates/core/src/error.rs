use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("coefficient domain error at n = {n}: {reason}")]
    Domain { n: u64, reason: String },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("degenerate pivot: lambda coincides with b_(N-{j})")]
    DegeneratePivot { j: usize },

    #[error("eigenvector residual {residual:e} exceeds tolerance {tolerance:e}")]
    Residual { residual: f64, tolerance: f64 },

    #[error("zero cross-check failed: {0}")]
    CrossCheck(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
