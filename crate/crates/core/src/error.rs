use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("moment order {requested} exceeds expansion order {max}")]
    OrderTooHigh { requested: usize, max: usize },

    #[error("symmetric eigen-solve for Hermite order {0} did not converge")]
    EigenSolve(usize),

    #[error("ill-conditioned rebase: coefficient magnitude {magnitude:e} exceeds 1e6 * rho = {limit:e}")]
    IllConditionedRebase { magnitude: f64, limit: f64 },

    #[error("realizability lost{}: rho = {rho:e}, u_th^2 = {uth_sq:e}", cell_suffix(.cell))]
    Realizability {
        cell: Option<usize>,
        rho: f64,
        uth_sq: f64,
    },

    #[error("step {step} at t = {time}: {source}")]
    Aborted {
        step: usize,
        time: f64,
        source: Box<Error>,
    },

    #[error("v-direction CFL violated: |E|max * dt / dv = {0:.4} > 1")]
    VelocityCfl(f64),

    #[error("damping fit needs at least 2 peaks in window, found {0}")]
    TooFewPeaks(usize),

    #[error("config error: {0}")]
    Config(#[from] ConfigError),

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

fn cell_suffix(cell: &Option<usize>) -> String {
    cell.map(|c| format!(" in cell {c}")).unwrap_or_default()
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, err: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            message: err.to_string(),
        }
    }
}

/// Errors raised while reading or validating a configuration.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("unknown config key `{0}`")]
    UnknownKey(String),

    #[error("invalid value `{value}` for key `{key}`: {reason}")]
    InvalidValue {
        key: String,
        value: String,
        reason: String,
    },

    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },

    #[error("cannot read config file {path}: {message}")]
    Unreadable { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
