use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("odd number of tokens ({0}); a Gauss code has two tokens per chord")]
    OddLength(usize),
    #[error("label `{label}` occurs {count} times (token {position}); every label must occur exactly twice")]
    BadMultiplicity {
        label: String,
        count: usize,
        position: usize,
    },
    #[error("malformed token `{token}` at position {position}")]
    BadToken { token: String, position: usize },
    #[error("crossing {0} lacks an over or an under passage")]
    MissingPassage(String),
    #[error("crossing {0} carries different signs on its two passages")]
    SignMismatch(String),
    #[error("chord {0} is not present")]
    AbsentChord(u32),
    #[error("illegal move: {0}")]
    IllegalMove(String),
    #[error("parity assignments use different coefficient groups")]
    GroupMismatch,
    #[error("diagram lacks the decorations needed to build its surface")]
    InsufficientDecoration,
    #[error("chain is not a cycle")]
    NotACycle,
    #[error("diagram is not checkerboard colourable")]
    NotColourable,
    #[error("illegal walk: {0}")]
    IllegalWalk(String),
    #[error("free-link classifier could not decide within its bounds")]
    ClassifierInconclusive,
    #[error("bracket would need 2^{0} states, above the configured bound of {1} even crossings")]
    StateExplosion(usize, usize),
    #[error("integer overflow in exact arithmetic")]
    OverflowGuard,
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
