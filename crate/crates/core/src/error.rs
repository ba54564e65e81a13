use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("series too short: need at least {needed} samples, got {got}")]
    SeriesTooShort { needed: usize, got: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("trajectory diverged {restarts} times, giving up")]
    Diverged { restarts: usize },

    #[error("zero variance: {0}")]
    ZeroVariance(String),

    #[error("empty point set")]
    EmptyPointSet,

    #[error("requested {requested} neighbors but only {available} are available")]
    TooManyNeighbors { requested: usize, available: usize },

    #[error("only {valid} valid local dimension estimates (need at least {needed})")]
    TooFewEstimates { valid: usize, needed: usize },

    #[error("unsupported SOM shape: {self_dims} self-dynamics + {driver_dims} driver dimensions")]
    UnsupportedShape { self_dims: usize, driver_dims: usize },

    #[error("non-finite center at outer step {step}, node ({i}, {j})")]
    NonFiniteCenter { step: usize, i: usize, j: usize },

    #[error("rank-deficient view: {0}")]
    RankDeficient(String),

    #[error("correlation {rho:.4} exceeds the {levels}-level readout ceiling {ceiling}")]
    ImplausibleCorrelation { rho: f64, levels: usize, ceiling: f64 },

    #[error("malformed grid file: {0}")]
    MalformedGrid(String),

    #[error("unsupported grid file version `{0}`")]
    GridVersion(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("malformed CSV: {0}")]
    Csv(String),

    #[error("unknown export kind `{0}`")]
    UnknownExportKind(String),

    #[error("step {step} ({name}) failed: {source}")]
    Step {
        step: usize,
        name: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn at_step(self, step: usize, name: &'static str) -> Self {
        Error::Step { step, name, source: Box::new(self) }
    }

    /// Whether this error stems from configuration or input files rather than numerics.
    pub fn is_config(&self) -> bool {
        match self {
            Error::Config(_)
            | Error::InvalidParameter(_)
            | Error::UnknownExportKind(_)
            | Error::Io { .. }
            | Error::Csv(_)
            | Error::Json(_)
            | Error::MalformedGrid(_)
            | Error::GridVersion(_) => true,
            Error::Step { source, .. } => source.is_config(),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
