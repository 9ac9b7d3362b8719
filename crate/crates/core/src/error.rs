use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid bus parameters: {0}")]
    Params(String),

    #[error("invalid transition pattern: {0}")]
    Pattern(String),

    #[error("examined wire {wire} is not valid for a {width}-wire window")]
    ExaminedWire { wire: usize, width: usize },

    #[error("no transition on the examined wire")]
    NoTransition,

    #[error("50% crossing not bracketed before t = {limit_ps:.3} ps")]
    Divergence { limit_ps: f64 },

    #[error("classification invalid for lambda = {lambda} (requires lambda >= {min})")]
    Classification { lambda: f64, min: f64 },

    #[error("golden data: {0}")]
    Golden(String),

    #[error("unsupported constraint {0}")]
    UnsupportedConstraint(String),

    #[error("codeword width {width} is too small (need at least {min})")]
    Width { width: usize, min: usize },

    #[error("codebook provenance mismatch: expected {expected}, found {found}")]
    Provenance { expected: String, found: String },

    #[error("data word {data} out of range (code carries {bits} bits)")]
    DataRange { data: u128, bits: u32 },

    #[error("word {word} is not a member of the codebook")]
    NotMember { word: String },

    #[error("codebook needs at least {min} words, has {size}")]
    TooFewWords { size: usize, min: usize },

    #[error("codebook file: {0}")]
    Format(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
