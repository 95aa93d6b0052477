use thiserror::Error;

/// Errors shared by all modules of the toolkit.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error on line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("letter '{letter}' is not in the alphabet")]
    UnknownLetter { letter: char },
    #[error("rule for '{letter}' has an empty image")]
    EmptyImage { letter: char },
    #[error("substitution is not compatible: images {left} and {right} of '{letter}' have different letter counts")]
    NotCompatible {
        letter: char,
        left: String,
        right: String,
    },
    #[error("substitution is not primitive")]
    NotPrimitive,
    #[error("word '{word}' is not legal")]
    NotLegal { word: String },
    #[error("size limit exceeded: {what} would exceed {limit}")]
    SizeLimit { what: String, limit: usize },
    #[error("word of length {len} is too short for radius {radius}")]
    TooShort { len: usize, radius: usize },
    #[error("index range [{i}, {j}] out of range for length {len}")]
    IndexOutOfRange { i: usize, j: usize, len: usize },
    #[error("substitution is not recognisable within the searched radius: {msg}")]
    NotRecognisable { msg: String },
    #[error("permutation does not preserve word length ({left} vs {right})")]
    LengthChangingPermutation { left: String, right: String },
    #[error("no gap bound found below cap {cap}")]
    GapUnbounded { cap: usize },
    #[error("marker words do not share a unique common root: {msg}")]
    RootMismatch { msg: String },
    #[error("marker blocks overlap inconsistently: {msg}")]
    OverlapConflict { msg: String },
    #[error("window does not determine the run structure: {msg}")]
    InsufficientContext { msg: String },
    #[error("window '{window}' is not a legal word")]
    IllegalInput { window: String },
    #[error("invalid permutation: {msg}")]
    BadPermutation { msg: String },
    #[error("{msg}")]
    Precondition { msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
