use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("profile incomplete: no coin angle for position {position} at step {step}")]
    ProfileIncomplete { step: usize, position: i64 },

    #[error("not a step-{steps} unidirectional distribution: support reaches position {position}")]
    NotUnidirectional { steps: usize, position: i64 },

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("edge state undefined at θ₊=0 (normalization diverges)")]
    EdgeStateUndefined,

    #[error("window {window} too small: neglected tail mass {tail:.3e} ≥ 1e-12, use at least W = {suggested}")]
    WindowTooSmall { window: usize, tail: f64, suggested: usize },

    #[error("chain too short: {steps} steps need {needed} qutrits, layout has {available}")]
    ChainTooShort { steps: usize, needed: usize, available: usize },

    #[error("malformed gate: {0}")]
    MalformedGate(String),

    #[error("sub-normalized distribution (total {total}); diffusion distance needs a probability distribution")]
    SubNormalized { total: f64 },

    #[error("invalid config at `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("step ranges differ: {0}")]
    StepMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config { field: field.into(), message: message.into() }
    }
}
