use std::path::PathBuf;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("bad magic at byte 0: expected {expected:?}, found {found:?}")]
    BadMagic { expected: String, found: String },

    #[error("malformed header at byte {offset}: {reason}")]
    MalformedHeader { offset: usize, reason: String },

    #[error("truncated payload at byte {offset}: header promises {expected} bytes, found {found}")]
    TruncatedPayload {
        offset: usize,
        expected: usize,
        found: usize,
    },

    #[error("dimension mismatch at byte {offset}: {extra} bytes beyond the payload declared in the header")]
    TrailingBytes { offset: usize, extra: usize },

    #[error("non-finite value at byte {offset}")]
    NonFiniteBinary { offset: usize },

    #[error("line {line}, column {column}: cannot parse {token:?} as a number")]
    CsvParse { line: usize, column: usize, token: String },

    #[error("line {line}: expected {expected} columns, found {found}")]
    RaggedRow { line: usize, expected: usize, found: usize },

    #[error("line {line}, column {column}: non-finite value")]
    NonFiniteCsv { line: usize, column: usize },

    #[error("empty feature file")]
    Empty,

    #[error("annotation line {line}: {message}")]
    Annotation { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("sequence of {n_frames} frames is too short to encode (need at least 2)")]
    TooShort { n_frames: usize },

    #[error("degenerate segment of {frames} frames (approximate rank pooling needs at least 2)")]
    DegenerateSegment { frames: usize },

    #[error("rank pooling solver did not converge in {iterations} iterations (last objective {objective})")]
    NonConvergence { iterations: usize, objective: f64 },

    #[error("no evaluable reports to aggregate (all video pairs skipped)")]
    NothingToAggregate,
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn is_non_convergence(&self) -> bool {
        matches!(self, Error::NonConvergence { .. })
    }
}
