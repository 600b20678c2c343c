//! Error type shared by every module in the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The operation is defined but the signal cannot support it
    /// (e.g. normalizing silence, measuring level against zero power).
    #[error("degenerate signal: {0}")]
    DegenerateSignal(String),

    /// Required auxiliary data was not supplied.
    #[error("missing data: {0}")]
    MissingData(String),

    /// Score text could not be parsed.
    #[error("score parse error at line {line}, column {column}: {message}")]
    ScoreParse {
        line: usize,
        column: usize,
        message: String,
    },

    /// WAV bytes could not be decoded.
    #[error("malformed wav at byte {offset}: {message}")]
    WavParse { offset: u64, message: String },

    /// A score event failed to render; carries the event index.
    #[error("event {index}: {source}")]
    Event {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn degenerate(msg: impl Into<String>) -> Self {
        Error::DegenerateSignal(msg.into())
    }

    pub fn missing(msg: impl Into<String>) -> Self {
        Error::MissingData(msg.into())
    }

    pub fn for_event(index: usize, source: Error) -> Self {
        Error::Event {
            index,
            source: Box::new(source),
        }
    }

    pub fn wav_parse(offset: usize, message: impl Into<String>) -> Self {
        Error::WavParse {
            offset: offset as u64,
            message: message.into(),
        }
    }

    pub fn score_parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::ScoreParse {
            line,
            column,
            message: message.into(),
        }
    }
}
