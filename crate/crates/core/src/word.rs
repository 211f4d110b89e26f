//! Finite words over a small alphabet of ASCII symbols.

use std::borrow::Borrow;
use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An ordered list of at least two distinct symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<u8>,
}

impl Alphabet {
    pub fn new(symbols: &[u8]) -> Result<Self> {
        let text = String::from_utf8_lossy(symbols).into_owned();
        if symbols.len() < 2 || !symbols.iter().all(|s| s.is_ascii_graphic() && *s != b'.') {
            return Err(Error::InvalidAlphabet(text));
        }
        for (i, s) in symbols.iter().enumerate() {
            if symbols[..i].contains(s) {
                return Err(Error::InvalidAlphabet(text));
            }
        }
        Ok(Self { symbols: symbols.to_vec() })
    }

    pub fn binary() -> Self {
        Self { symbols: b"01".to_vec() }
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn size(&self) -> usize {
        self.symbols.len()
    }

    pub fn contains(&self, symbol: u8) -> bool {
        self.symbols.contains(&symbol)
    }

    /// Checks that every letter of `word` belongs to this alphabet.
    pub fn check(&self, word: &[u8]) -> Result<()> {
        match word.iter().find(|s| !self.contains(**s)) {
            Some(&s) => Err(Error::ForeignSymbol {
                symbol: s as char,
                alphabet: String::from_utf8_lossy(&self.symbols).into_owned(),
            }),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&String::from_utf8_lossy(&self.symbols))
    }
}

/// A finite word; the empty word ε is the zero-length value.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_bytes(bytes: &[u8]) -> Self {
        Word(bytes.to_vec())
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.0
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn concat(&self, other: &[u8]) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(other);
        Word(v)
    }

    pub fn push(&mut self, symbol: u8) {
        self.0.push(symbol);
    }

    /// `self` repeated `k` times.
    pub fn power(&self, k: usize) -> Word {
        Word(self.0.repeat(k))
    }

    pub fn slice(&self, from: usize, to: usize) -> Word {
        Word(self.0[from..to].to_vec())
    }

    /// True if `needle` occurs as a factor.
    pub fn contains_factor(&self, needle: &[u8]) -> bool {
        needle.is_empty() || self.0.windows(needle.len()).any(|w| w == needle)
    }
}

impl Deref for Word {
    type Target = [u8];
    fn deref(&self) -> &[u8] {
        &self.0
    }
}

impl Borrow<[u8]> for Word {
    fn borrow(&self) -> &[u8] {
        &self.0
    }
}

impl From<&str> for Word {
    fn from(s: &str) -> Self {
        Word(s.as_bytes().to_vec())
    }
}

impl From<Vec<u8>> for Word {
    fn from(v: Vec<u8>) -> Self {
        Word(v)
    }
}

impl FromStr for Word {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if !s.bytes().all(|b| b.is_ascii_graphic() && b != b'.') {
            return Err(Error::Parse(format!("not a word: {s:?}")));
        }
        Ok(Word::from(s))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            f.write_str("ε")
        } else {
            f.write_str(&String::from_utf8_lossy(&self.0))
        }
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&String::from_utf8_lossy(&self.0))
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ok(Word::from(s.as_str()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alphabet_rejects_duplicates_and_singletons() {
        assert!(Alphabet::new(b"0").is_err());
        assert!(Alphabet::new(b"010").is_err());
        assert!(Alphabet::new(b"ab").is_ok());
        assert!(Alphabet::new(b"a.").is_err());
    }

    #[test]
    fn foreign_symbol_is_reported() {
        let a = Alphabet::binary();
        assert!(a.check(b"0110").is_ok());
        assert_eq!(
            a.check(b"012"),
            Err(Error::ForeignSymbol { symbol: '2', alphabet: "01".into() })
        );
    }

    #[test]
    fn empty_word_displays_as_epsilon() {
        assert_eq!(Word::empty().to_string(), "ε");
        assert_eq!(Word::from("01").power(3).to_string(), "010101");
    }
}
