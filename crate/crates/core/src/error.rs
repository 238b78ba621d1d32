use std::path::PathBuf;

use thiserror::Error;

use crate::field::CellField;
use crate::problem::AssumptionReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite evaluation of {what} at x = {x}, u = {u}")]
    Evaluation { what: &'static str, x: f64, u: f64 },

    #[error("structural error: {0}")]
    Structural(String),

    #[error("invalid parameter `{name}`: {message}")]
    Parameter { name: String, message: String },

    #[error("time step {dt:e} exceeds the stable limit {limit:e}")]
    Stability { dt: f64, limit: f64 },

    #[error("numerical dissipation {theta} is below the wave speed {speed} (monotonicity lost)")]
    Monotonicity { theta: f64, speed: f64 },

    /// The solver produced a non-finite value. `last_good` is the state at
    /// `time` before the failing step.
    #[error("non-finite state after step from t = {time}")]
    NonFinite { time: f64, last_good: Box<CellField> },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("unknown catalog problem `{0}`")]
    UnknownProblem(String),

    #[error("{}", .0.summary())]
    AssumptionViolated(Box<AssumptionReport>),

    #[error("trajectory has {states} states but {dts} time steps; per-step dt metadata is required")]
    MissingDt { states: usize, dts: usize },

    #[error("config error at line {line}, key `{key}`: {message}")]
    Config { key: String, line: usize, message: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(name: &str, message: impl Into<String>) -> Self {
        Error::Parameter { name: name.to_string(), message: message.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
