use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("alphabet mismatch: {left} vs {right}")]
    AlphabetMismatch { left: usize, right: usize },

    #[error("tilted distribution is undefined: supports do not intersect")]
    DegenerateTilt,

    #[error("sequence is empty")]
    EmptySequence,

    #[error("symbol {symbol} outside alphabet of size {alphabet_size}")]
    SymbolOutOfRange { symbol: usize, alphabet_size: usize },

    #[error("invalid type vector: {0}")]
    InvalidType(String),

    #[error("enumeration of {count} type classes exceeds the limit of {limit}")]
    EnumerationOverflow { count: u128, limit: u128 },

    #[error("invalid hypothesis set: {0}")]
    InvalidHypothesisSet(String),

    #[error("negative robustness radius {value} for hypothesis {index}")]
    NegativeEpsilon { index: usize, value: f64 },

    #[error("quantizer word length {0} outside 1..=52 bits")]
    InvalidQuantizerBits(u32),

    #[error("quantization at {bits} bits leaves last entry {last} outside [0, 1]")]
    InvalidQuantization { bits: u32, last: f64 },

    #[error("ratio curve undefined: minimum pairwise Chernoff information is zero")]
    DegenerateRatio,

    #[error("empirical exponent undefined: {0}")]
    UndefinedExponent(String),

    #[error("invalid experiment plan: {0}")]
    InvalidPlan(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
