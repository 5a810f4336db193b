use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("topology generation failed: {0}")]
    Generation(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("contract violation: {0}")]
    ContractViolation(String),

    /// The requested operation has no connectivity guarantee at this cone angle.
    #[error("alpha = {alpha:.6} rad exceeds {limit:.6} rad; {what} is not connectivity-safe")]
    GuaranteeViolation {
        alpha: f64,
        limit: f64,
        what: &'static str,
    },

    #[error("inconclusive stabilization: {0}")]
    InconclusiveStabilization(String),

    #[error("pipeline failed for seed {seed}: {source}")]
    Pipeline {
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
