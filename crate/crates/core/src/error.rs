use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("invalid word: {0}")]
    InvalidWord(String),

    #[error("word length {len} exceeds cap {cap}")]
    WordLengthCap { len: usize, cap: usize },

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("sequence horizon exceeded: need t={needed}, have {available}")]
    HorizonExceeded { needed: usize, available: usize },

    #[error("size bound exceeded: {0}")]
    SizeBound(String),

    #[error("partial associativity violated: {0}")]
    Associativity(String),

    #[error("shift map gap at depth {depth} for element {element}")]
    ShiftGap { depth: usize, element: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("certificate error: {0}")]
    Certificate(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
