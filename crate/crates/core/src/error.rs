use thiserror::Error;

/// Errors raised by the simulator, analytics and I/O layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid state: bid {bid} must be strictly below ask {ask}")]
    InvalidState { bid: i64, ask: i64 },

    #[error("illegal embedded transition {from} -> {to}")]
    IllegalTransition { from: u64, to: u64 },

    #[error("event ceiling of {limit} reached at t = {time} (possible explosion)")]
    EventCeiling { limit: u64, time: f64 },

    #[error("closed-form analytics are only available for the HC regime with uniform catastrophes; use Monte Carlo mode for {0}")]
    AnalyticsUnavailable(String),

    #[error("stationary constructions disagree: total variation {0:e}")]
    InconsistentMeasure(f64),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag used by the CLI error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::InvalidState { .. } => "invalid_state",
            Error::IllegalTransition { .. } => "illegal_transition",
            Error::EventCeiling { .. } => "event_ceiling",
            Error::AnalyticsUnavailable(_) => "analytics_unavailable",
            Error::InconsistentMeasure(_) => "inconsistent_measure",
            Error::Parse { .. } => "parse",
            Error::Unknown { .. } => "unknown_name",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
