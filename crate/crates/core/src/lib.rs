//! Exact, window-relative computations for the labeled space, AF core, traces and
//! K-theory truncations attached to a two-sided minimal subshift.

pub mod af_core;
pub mod clopen;
pub mod error;
pub mod ktheory;
pub mod labeled_space;
pub mod language;
pub mod matrix;
pub mod measures;
pub mod seqgen;
pub mod snf;
pub mod word;

pub use error::{Error, Result};
pub use language::{factors, LanguageTable};
pub use seqgen::{MorseSpec, SequenceSource, Substitution, Window};
pub use word::{Alphabet, Word};
