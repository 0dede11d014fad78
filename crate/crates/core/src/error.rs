use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid initial data: {0}")]
    InvalidInitialData(String),

    #[error("initial-data bound `{name}` = {value:.6e} exceeds C0 = {c0:.6e}")]
    InitialBoundExceeded { name: String, value: f64, c0: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("blow-up at t = {time:.6e}: max |u| = {max_abs:.6e}")]
    BlowUp { time: f64, max_abs: f64 },

    #[error("boundary contamination at t = {time:.6e}: outer-quarter max {outer:.3e} vs interior max {inner:.3e}")]
    BoundaryContamination { time: f64, outer: f64, inner: f64 },

    #[error("step size stagnated at t = {time:.6e} (dt = {dt:.3e})")]
    Stagnation { time: f64, dt: f64 },

    #[error("CFL violation: dt = {dt:.6e} exceeds limit {limit:.6e}")]
    CflViolation { dt: f64, limit: f64 },

    #[error(
        "oracle refinement stalled after {doublings} doublings (last difference {last_diff:.3e}, tolerance {tol:.3e})"
    )]
    OracleStalled { doublings: usize, last_diff: f64, tol: f64 },

    #[error("missing tendency data: the run did not record time derivatives")]
    MissingTendencies,

    #[error("config error: {0}")]
    Config(String),

    #[error("sweep failed: {failed} of {total} runs failed")]
    SweepFailed { failed: usize, total: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::InvalidGrid(_)
            | Error::InvalidModel(_)
            | Error::InvalidInitialData(_)
            | Error::InitialBoundExceeded { .. }
            | Error::InvalidArgument(_) => 2,
            Error::OracleStalled { .. } => 4,
            Error::Io(_) | Error::Csv(_) | Error::Json(_) => 1,
            _ => 3,
        }
    }
}
