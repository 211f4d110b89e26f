use thiserror::Error;

use crate::word::Word;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("alphabet must contain at least two distinct symbols, got {0:?}")]
    InvalidAlphabet(String),

    #[error("symbol {symbol:?} is not in the alphabet {alphabet:?}")]
    ForeignSymbol { symbol: char, alphabet: String },

    #[error("operation requires the binary alphabet {{0,1}}, word {0} is not binary")]
    UnsupportedAlphabet(Word),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("Morse blocks only cover {covered} symbols, {needed} requested")]
    NeedsMoreBlocks { covered: usize, needed: usize },

    #[error("invalid seed: {0}")]
    InvalidSeed(String),

    #[error("window of length {len} is too short for language depth {depth}")]
    InsufficientWindow { len: usize, depth: usize },

    #[error("word {word} occurs {count} time(s) in the scan region, at least two needed")]
    InsufficientOccurrences { word: Word, count: usize },

    #[error("word {0} is not in the language")]
    UnknownWord(Word),

    #[error("language depth {depth} is too shallow, {needed} required")]
    DepthExceeded { depth: usize, needed: usize },

    #[error("length {0} is out of range")]
    OutOfRange(usize),

    #[error("substitution is not primitive up to power {0}; invariant measure is not uniquely certified")]
    NotUniquelyCertified(usize),

    #[error("measure has depth {depth}, word length {needed} requested")]
    MeasureDepth { depth: usize, needed: usize },

    #[error("strong cofinality certificate failed at {witness}: {reason}")]
    CertificateFailure { witness: Word, reason: String },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
