use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: expected {expected} values, found {found}")]
    Dimension { line: usize, expected: usize, found: usize },

    #[error("line {line}: duplicate token `{token}`")]
    DuplicateToken { line: usize, token: String },

    #[error("non-finite value in row of token `{token}`")]
    NonFinite { token: String },

    #[error("empty input")]
    EmptyInput,

    #[error("empty matrix")]
    EmptyMatrix,

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("system of {size} vertices exceeds the dense solver limit of {limit}")]
    TooLarge { size: usize, limit: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("ordinal {ordinal} out of range for vocabulary of size {size}")]
    OrdinalOutOfRange { ordinal: usize, size: usize },

    #[error("undefined similarity: zero-norm vector")]
    ZeroNorm,

    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(String),

    #[error("not enough usable items: used {used}, skipped {skipped}")]
    InsufficientItems { used: usize, skipped: usize },

    #[error("tokens missing from vocabulary: {}", .0.join(", "))]
    MissingTokens(Vec<String>),
}
