use thiserror::Error;

/// Errors raised across the toolkit.
///
/// The CLI maps these onto process exit codes: solver failures exit with 3,
/// everything else that stems from bad input exits with 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("structural error: {0}")]
    Structural(String),
    #[error("provenance error: {0}")]
    Provenance(String),
    #[error("degenerate solution: {0}")]
    DegenerateSolution(String),
    #[error("refused: {0}")]
    Refused(String),
    #[error("unsupported estimator: {0}")]
    UnsupportedEstimator(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// True for failures that originate in the LP solver rather than in the inputs.
    pub fn is_solver_failure(&self) -> bool {
        matches!(self, Error::Solver(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
