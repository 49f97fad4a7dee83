use std::path::PathBuf;

/// Errors raised by the simulator.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("resource limit: {0}")]
    ResourceLimit(String),

    /// The bi-Lanczos recursion lost biorthogonality or hit a serious breakdown.
    #[error("numerical breakdown at step {step}: {detail}")]
    NumericalBreakdown { step: usize, detail: String },

    #[error("degenerate state: {0}")]
    DegenerateState(String),

    /// A basis did not capture the full weight of the operator it was applied to.
    #[error("basis incomplete: captured weight {captured:e}, operator norm {norm:e}")]
    BasisIncomplete { captured: f64, norm: f64 },

    #[error("run aborted: {0}")]
    AbortedRun(String),

    #[error("config: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
