//! Alphabets, letters and finite words.
//!
//! Letters are stored as indices into their alphabet, so word comparison
//! (and hence every sorted set in the toolkit) follows alphabet order.

use std::fmt;

use crate::error::{Error, Result};

/// A letter, identified by its index in the owning alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(pub u8);

impl Letter {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// An ordered alphabet of distinct printable symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<char>,
}

impl Alphabet {
    pub fn new(symbols: Vec<char>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::Syntax {
                line: 0,
                msg: "alphabet must contain at least one letter".into(),
            });
        }
        for (i, &c) in symbols.iter().enumerate() {
            if c.is_whitespace() || !c.is_ascii_graphic() {
                return Err(Error::Syntax {
                    line: 0,
                    msg: format!("'{c}' is not a printable non-whitespace symbol"),
                });
            }
            if symbols[..i].contains(&c) {
                return Err(Error::Syntax {
                    line: 0,
                    msg: format!("duplicate letter '{c}' in alphabet"),
                });
            }
        }
        if symbols.len() > u8::MAX as usize {
            return Err(Error::SizeLimit {
                what: "alphabet size".into(),
                limit: u8::MAX as usize,
            });
        }
        Ok(Alphabet { symbols })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.symbols.len() as u8).map(Letter)
    }

    pub fn symbol(&self, l: Letter) -> char {
        self.symbols[l.index()]
    }

    pub fn letter_of(&self, c: char) -> Result<Letter> {
        self.symbols
            .iter()
            .position(|&s| s == c)
            .map(|i| Letter(i as u8))
            .ok_or(Error::UnknownLetter { letter: c })
    }

    /// Parses a word written with this alphabet's symbols.
    pub fn word(&self, s: &str) -> Result<Word> {
        s.chars().map(|c| self.letter_of(c)).collect::<Result<Vec<_>>>().map(Word)
    }

    pub fn format(&self, w: &Word) -> String {
        w.0.iter().map(|&l| self.symbol(l)).collect()
    }
}

/// A finite word over an alphabet. The empty word is allowed.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn single(l: Letter) -> Self {
        Word(vec![l])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn slice(&self, start: usize, end: usize) -> Word {
        Word(self.0[start..end].to_vec())
    }

    pub fn starts_with(&self, other: &Word) -> bool {
        self.0.starts_with(&other.0)
    }

    pub fn ends_with(&self, other: &Word) -> bool {
        self.0.ends_with(&other.0)
    }

    pub fn contains(&self, other: &Word) -> bool {
        if other.is_empty() {
            return true;
        }
        self.0.windows(other.len()).any(|w| w == other.0.as_slice())
    }

    /// Number of (possibly overlapping) occurrences of `other` in `self`.
    pub fn count_occurrences(&self, other: &Word) -> usize {
        if other.is_empty() || other.len() > self.len() {
            return 0;
        }
        self.0
            .windows(other.len())
            .filter(|w| *w == other.0.as_slice())
            .count()
    }

    /// Start positions of all occurrences of `other` in `self`.
    pub fn occurrences(&self, other: &Word) -> Vec<usize> {
        if other.is_empty() || other.len() > self.len() {
            return Vec::new();
        }
        self.0
            .windows(other.len())
            .enumerate()
            .filter(|(_, w)| *w == other.0.as_slice())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn repeat(&self, k: usize) -> Word {
        let mut v = Vec::with_capacity(self.len() * k);
        for _ in 0..k {
            v.extend_from_slice(&self.0);
        }
        Word(v)
    }

    pub fn rotation(&self, k: usize) -> Word {
        let n = self.len();
        if n == 0 {
            return Word::empty();
        }
        let k = k % n;
        let mut v = self.0[k..].to_vec();
        v.extend_from_slice(&self.0[..k]);
        Word(v)
    }

    /// Lexicographically least rotation.
    pub fn canonical_rotation(&self) -> Word {
        (0..self.len().max(1))
            .map(|k| self.rotation(k))
            .min()
            .unwrap_or_else(Word::empty)
    }

    /// True if the word equals w^k for some proper subword w and k >= 2.
    pub fn is_proper_power(&self) -> bool {
        let n = self.len();
        for p in 1..n {
            if n % p == 0 && (p..n).all(|i| self.0[i] == self.0[i - p]) {
                return true;
            }
        }
        false
    }

    /// All distinct subwords of length exactly `k`.
    pub fn subwords(&self, k: usize) -> impl Iterator<Item = Word> + '_ {
        self.0.windows(k.max(1)).filter(move |_| k >= 1).map(|w| Word(w.to_vec()))
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}
