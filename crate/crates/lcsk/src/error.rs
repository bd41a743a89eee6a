use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("alphabet must map between 2 and 256 distinct symbols, got {0}")]
    AlphabetSize(usize),
    #[error("duplicate alphabet symbol {0:?}")]
    DuplicateSymbol(char),
    #[error("unknown symbol {symbol:?} at input position {position}")]
    UnknownSymbol { symbol: char, position: usize },
    #[error("code {code} out of range for alphabet of size {sigma}")]
    CodeOutOfRange { code: u16, sigma: u16 },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("window [{start}, {start}+{length}) out of bounds for sequence of length {seq_len}")]
    WindowOutOfBounds {
        start: usize,
        length: usize,
        seq_len: usize,
    },
    #[error("window length {window} exceeds text length {text}")]
    WindowTooLong { window: usize, text: usize },
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("weight mass {mass} too large for exact correlation modulo {q}")]
    CorrelationOverflow { mass: u128, q: u64 },
    #[error("sketches were built under different specs")]
    SketchSpecMismatch,
    #[error("sequences use different alphabet sizes: {0} vs {1}")]
    SigmaMismatch(u16, u16),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
