//! Error type shared by the pipeline stages.

use alloc::string::String;
use core::fmt;

/// Convenience alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised by pipeline operations.
///
/// Per-record problems (malformed corpus lines, unknown dictionary tags) are
/// skipped and counted by the readers instead of surfacing here; `Error` is
/// reserved for conditions that make an operation's output meaningless.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An operation that requires a non-empty input got an empty one.
    /// The payload names the input.
    EmptyInput(&'static str),
    /// A topic cut produced an empty hashtag set.
    EmptyCut,
    /// A hashtag scheduled for a topic has no term vector.
    MissingVector(String),
    /// A hashtag in a topic cut has no hashtag document.
    MissingDocument(String),
    /// Duplicate label handed to the clusterer; labels must be unique.
    DuplicateLabel(String),
    /// Condensed distance matrix length does not match the label count.
    DistanceLengthMismatch { labels: usize, expected: usize, got: usize },
    /// The two rankings do not cover the same set of topic ids.
    RankingMismatch,
    /// Rank correlation needs at least two items.
    RankingTooShort(usize),
    /// A parameter is outside its valid range.
    InvalidParameter { name: &'static str, reason: &'static str },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyInput(what) => write!(f, "{what} must be non-empty"),
            Error::EmptyCut => write!(f, "topic cut produced an empty hashtag set"),
            Error::MissingVector(tag) => write!(f, "no term vector for hashtag {tag:?}"),
            Error::MissingDocument(tag) => write!(f, "no hashtag document for hashtag {tag:?}"),
            Error::DuplicateLabel(label) => write!(f, "duplicate cluster label {label:?}"),
            Error::DistanceLengthMismatch { labels, expected, got } => write!(
                f,
                "condensed distance matrix for {labels} labels must have {expected} entries, got {got}"
            ),
            Error::RankingMismatch => write!(f, "rankings do not cover the same topic ids"),
            Error::RankingTooShort(n) => {
                write!(f, "rank correlation needs at least 2 items, got {n}")
            }
            Error::InvalidParameter { name, reason } => {
                write!(f, "invalid parameter {name}: {reason}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
