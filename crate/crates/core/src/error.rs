use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    /// A model or discretisation parameter is outside its legal range.
    #[error("invalid parameter `{name}` = {value}: must be {range}")]
    Parameter {
        name: &'static str,
        value: String,
        range: &'static str,
    },

    #[error("singular multiplier `{symbol}` at wavenumber {xi}: value {value}")]
    SingularMultiplier {
        symbol: String,
        xi: f64,
        value: f64,
    },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("dyadic scale {scale} is outside the resolvable range [{min}, {max}]")]
    ScaleOutOfRange { scale: f64, min: f64, max: f64 },

    /// An estimate verifier found a trial where the right-hand side vanishes
    /// while the left-hand side does not, or an exact inequality is violated.
    #[error("counterexample for {estimate}: {detail}")]
    Counterexample { estimate: String, detail: String },

    #[error("solution blew up at t = {t}: {detail}")]
    BlowUp { t: f64, detail: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &'static str, value: impl ToString, range: &'static str) -> Self {
        Error::Parameter {
            name,
            value: value.to_string(),
            range,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
