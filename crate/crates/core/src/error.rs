use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("degenerate parameters: {0}")]
    DegenerateParams(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("1-d minimization did not converge at coordinate {coordinate} after {iterations} iterations")]
    SolverNonConvergence { coordinate: usize, iterations: usize },

    #[error("sweep cell failed at delta={delta:e}, trial={trial}: {source}")]
    SweepCell {
        delta: f64,
        trial: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable machine-readable tag for the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::InvalidParams(_) => "invalid_params",
            Error::DegenerateParams(_) => "degenerate_params",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::SolverNonConvergence { .. } => "solver_non_convergence",
            Error::SweepCell { .. } => "sweep_cell",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }

    /// Coordinate index carried by a solver failure, looking through sweep wrappers.
    pub fn coordinate(&self) -> Option<usize> {
        match self {
            Error::SolverNonConvergence { coordinate, .. } => Some(*coordinate),
            Error::SweepCell { source, .. } => source.coordinate(),
            _ => None,
        }
    }

    pub(crate) fn with_coordinate(self, coordinate: usize) -> Self {
        match self {
            Error::SolverNonConvergence { iterations, .. } => Error::SolverNonConvergence {
                coordinate,
                iterations,
            },
            other => other,
        }
    }
}
