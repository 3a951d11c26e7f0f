use std::path::PathBuf;

/// Errors raised by the grid, solvers, diagnostics and I/O layers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Shapes or timelines that do not line up (length mismatch, different grids).
    #[error("structural error: {0}")]
    Structural(String),
    /// A precondition on an argument was violated.
    #[error("contract error: {0}")]
    Contract(String),
    /// An argument lies outside the domain of a function.
    #[error("domain error: {0}")]
    Domain(String),
    /// The weight f'/f was requested below the configured floor.
    #[error("positivity floor: rho evaluated at {xi:e} below floor {floor:e}")]
    PositivityFloor { xi: f64, floor: f64 },
    /// A constitutive function failed one of the structural hypotheses.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    /// Linear or nonlinear solve failure inside a time step.
    #[error("scheme error at t = {t}: {msg}")]
    Scheme { t: f64, msg: String },
    /// Temperature undershoot beyond tolerance.
    #[error("positivity error at t = {t}: min theta = {min:e} (tolerance {tol:e})")]
    Positivity { t: f64, min: f64, tol: f64 },
    /// Invalid configuration; carries every problem found, not just the first.
    #[error("config error:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),
    #[error("i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Attach a time stamp to scheme failures that were raised without one.
    pub(crate) fn at_time(self, time: f64) -> Self {
        match self {
            Error::Scheme { msg, .. } => Error::Scheme { t: time, msg },
            Error::Positivity { min, tol, .. } => Error::Positivity { t: time, min, tol },
            other => other,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
