use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value is out of its admissible range.
    #[error("configuration error: {0}")]
    Config(String),

    /// A document could not be parsed; `field` names the offending key.
    #[error("parse error in `{field}`: {message}")]
    Parse { field: String, message: String },

    /// A schedule could not be encoded as a model assignment.
    #[error("encoding error: {0}")]
    Encode(String),

    /// A bit vector or assignment does not describe a schedule.
    #[error("decode error: malformed groups [{}]", .groups.join(", "))]
    Decode { groups: Vec<String> },

    /// Caller-supplied data violates an operation's precondition.
    #[error("input error: {0}")]
    Input(String),

    #[error("suite error: {0}")]
    Suite(String),

    #[error("report error: {0}")]
    Report(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
