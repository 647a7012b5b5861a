use thiserror::Error;

/// Unified error type for the whole library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mismatched element representations: {0} vs {1}")]
    Representation(&'static str, &'static str),
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("argument of z lies on the sector boundary ray |arg z| = zeta*pi/2")]
    SectorBoundary,
    #[error("power series loses all significant digits at |z| = {abs_z} (beta = {beta})")]
    SeriesLoss { beta: f64, abs_z: f64 },
    #[error("overflow in {0}")]
    Overflow(String),
    #[error("time {t} is not an on-grid shift for step {h}")]
    TimeGrid { t: f64, h: f64 },
    #[error("orbit support escapes the grid window at t = {t}")]
    Window { t: f64 },
    #[error("sample-time mismatch between traces; no silent resampling is performed")]
    SampleTimes,
    #[error("length mismatch: {0}")]
    Length(String),
    #[error("wrong family kind: expected {expected}, got {got}")]
    Kind {
        expected: &'static str,
        got: &'static str,
    },
    #[error("quadrature failure: {0}")]
    Quadrature(String),
    #[error("config error at {path}: {message}")]
    Config { path: String, message: String },
    #[error("i/o failure at {path}: {message}")]
    Io { path: String, message: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn parameter(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }

    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}
