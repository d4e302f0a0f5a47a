use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid game configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid mixed strategy (a = {a}, b = {b}): {reason}")]
    InvalidProbability { a: f64, b: f64, reason: &'static str },

    #[error("expected {expected} opponent strategies, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("operation requires K = 2, got K = {k}")]
    UnsupportedDimension { k: usize },

    #[error(
        "pure-strategy enumeration over 3^{k} profiles exceeds the limit (K <= {max}); \
         use the symmetric mixed solver instead"
    )]
    EnumerationLimit { k: usize, max: usize },

    #[error("W = {w} is below the full-transmit threshold W* = {w_star}")]
    OutOfRegime { w: f64, w_star: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
