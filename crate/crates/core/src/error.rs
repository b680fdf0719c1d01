use std::path::{Path, PathBuf};

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("empty lexicon")]
    EmptyLexicon,

    #[error("duplicate concept id {0:?}")]
    DuplicateConcept(String),

    #[error("probability for {word:?} out of (0, 1]: {value}")]
    InvalidProbability { word: String, value: f64 },

    #[error("empty taxonomy")]
    EmptyTaxonomy,

    #[error("record {index}: {message}")]
    Record { index: usize, message: String },

    #[error("duplicate service names: {}", .0.join(", "))]
    DuplicateServices(Vec<String>),

    #[error("lexical form {0:?} carries no information")]
    UndefinedScore(String),

    #[error("weights must lie in [0, 1] and sum to 1 (got w1={w1}, w2={w2})")]
    InvalidWeights { w1: f64, w2: f64 },

    #[error("{name} out of range: {value}")]
    OutOfRange { name: &'static str, value: f64 },

    #[error("not an index file (bad magic)")]
    BadMagic,

    #[error("unsupported index format version {found} (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },

    #[error("index integrity check failed: {0}")]
    Integrity(String),

    #[error("requirements line {line}: {message}")]
    Requirements { line: usize, message: String },
}

impl Error {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io { path: path.to_owned(), source }
    }
}
