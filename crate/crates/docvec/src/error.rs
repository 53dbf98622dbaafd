//! Error type shared across the toolkit.

use std::path::PathBuf;

/// Everything that can go wrong while building corpora, training vectors, or
/// evaluating analogies.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A file did not match its expected format. `line` is 1-based when known.
    #[error("{path}:{line}: {message}")]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },

    /// Corpus-level violations: duplicate titles, empty vocabulary, and friends.
    #[error("{0}")]
    Corpus(String),

    /// A caller-supplied parameter is out of range or inconsistent.
    #[error("{0}")]
    Param(String),

    /// Unknown training method name.
    #[error("unknown method `{0}` (available: {1})")]
    UnknownMethod(String, String),

    /// Evaluation-time mismatches, e.g. test-set labels missing from a vector file.
    #[error("{0}")]
    Eval(String),

    /// An artifact's checksum does not match its manifest.
    #[error("{0}")]
    Checksum(String),

    /// Training produced a non-finite parameter (learning rate too high).
    #[error("{0}")]
    Diverged(String),

    /// Bad `key=value` entry in a config file.
    #[error("{0}")]
    Config(String),
}

impl Error {
    /// Machine-readable category, stable across releases. The CLI prints this
    /// as the first token of its one-line error output.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::Format { .. } => "format",
            Error::Corpus(_) => "corpus",
            Error::Param(_) => "param",
            Error::UnknownMethod(..) => "method",
            Error::Eval(_) => "eval",
            Error::Checksum(_) => "checksum",
            Error::Diverged(_) => "diverged",
            Error::Config(_) => "config",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(
        path: impl Into<PathBuf>,
        line: usize,
        message: impl Into<String>,
    ) -> Self {
        Error::Format {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
