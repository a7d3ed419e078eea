use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the pricing engine.
///
/// Variants split into two families: configuration problems (bad inputs,
/// malformed files) and numerical failures discovered while computing.
/// The CLI maps the first family to exit code 2 and the second to 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error(
        "likelihood ratio saturated: log value {log_value} is outside the representable range"
    )]
    Saturation { log_value: f64 },

    #[error("singular market: stock volatility a + kappa = {value:e} at t = {t}")]
    SingularMarket { t: f64, value: f64 },

    #[error("no bracket found for market clearing at t = {t} (inverse marginals violate Inada conditions numerically)")]
    BracketNotFound { t: f64 },

    #[error("price/dividend ratio {pd:e} at t = {t} exceeds 1e6; the integrability condition is probably violated")]
    IntegrabilityViolation { t: f64, pd: f64 },

    #[error("feedback step {step}: no root in [{lo}, {hi}] (residuals {f_lo:e}, {f_hi:e}); beliefs: {dump}")]
    NoRootInBracket {
        step: usize,
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
        dump: String,
    },

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("{path}:{line}: {reason}")]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by the caller's inputs rather than by the numerics.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::EmptyInput(_)
                | Error::Parse { .. }
                | Error::Config(_)
                | Error::Io { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
