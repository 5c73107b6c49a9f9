use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("enumeration bound exceeded: requested {requested}, configured limit {limit}")]
    ResourceLimit { requested: u128, limit: u128 },

    #[error("field pools do not cover the requested range: {0}")]
    Coverage(String),

    #[error("invalid local condition: {0}")]
    InvalidCondition(String),

    #[error("wild-wild compositum at p={p} is not supported")]
    UnsupportedWild { p: u32 },

    #[error("series diverges at s={s}: rightmost pole is at 1/a = {pole}")]
    Divergence { s: f64, pole: f64 },

    #[error("requested precision of {digits} digits is not reachable")]
    PrecisionUnreachable { digits: u32 },

    #[error("lemma hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("no power saving provable for this group: {0}")]
    NotApplicable(String),

    #[error("invalid group specification: {0}")]
    GroupSpec(String),

    #[error("ingest mismatch: {0}")]
    IngestMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed cache file: {0}")]
    Cache(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
