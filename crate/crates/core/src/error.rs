use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("row {row} is not stochastic: {reason}")]
    NotStochastic { row: usize, reason: String },

    #[error("entry ({row}, {col}) = {value} is positive but below alpha = {alpha}")]
    BelowAlpha {
        row: usize,
        col: usize,
        value: String,
        alpha: String,
    },

    #[error("{0}")]
    Capability(String),

    #[error("enumeration of {requested} products exceeds the cap of {cap}")]
    EnumerationCap { requested: u128, cap: u128 },

    #[error("invalid delay schedule: {0}")]
    InvalidDelays(String),

    #[error("invalid trace: {0}")]
    InvalidTrace(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("cannot parse `{field}`: {reason}")]
    Parse { field: String, reason: String },

    #[error("support lemma violated at t = {t}: {detail}")]
    LemmaViolation { t: usize, detail: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub fn parse(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parse {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
