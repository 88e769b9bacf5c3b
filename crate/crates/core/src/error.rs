use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },

    #[error("parse error at byte {offset} (line {line}, column {column}): {message}")]
    Parse {
        offset: usize,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("duplicate document id {0:?}")]
    DuplicateId(String),

    #[error("word {0:?} is assigned to more than one topic")]
    DuplicateWord(String),

    #[error("empty corpus after preprocessing")]
    EmptyCorpus,

    #[error("emotion {0:?} has no polarity")]
    MissingPolarity(String),

    #[error("no documents labelled with emotion {0:?}")]
    NoDocumentsForEmotion(String),

    #[error("unknown emotion {0:?}")]
    UnknownEmotion(String),

    #[error("word {0:?} is not covered by the topic partition")]
    UnknownWord(String),

    #[error("no tokens")]
    NoTokens,

    #[error("no modelled tokens")]
    NoModelledTokens,

    #[error("posterior is undefined: every emotion has zero likelihood for this document")]
    DegeneratePosterior,

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("unsupported model format version {found} (this build reads version {supported})")]
    VersionMismatch { found: u32, supported: u32 },

    #[error("report requires topic variant")]
    RequiresTopicVariant,

    #[error("text is {size} bytes, limit is {limit}")]
    TextTooLarge { size: usize, limit: usize },

    #[error("{0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Builds a [`Error::Parse`] from a serde_json error, translating its
    /// line/column position into a byte offset within `text`.
    pub(crate) fn from_json(err: serde_json::Error, text: &str) -> Self {
        let line = err.line();
        let column = err.column();
        let offset = if line == 0 {
            0
        } else {
            let line_start: usize = text
                .split_inclusive('\n')
                .take(line - 1)
                .map(str::len)
                .sum();
            (line_start + column.saturating_sub(1)).min(text.len())
        };
        Error::Parse {
            offset,
            line,
            column,
            message: err.to_string(),
        }
    }
}
