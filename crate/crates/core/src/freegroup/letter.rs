use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_RANK: usize = 16;

/// Rank of the free group, `2 <= N <= 16`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Rank(u8);

impl Rank {
    pub fn new(n: usize) -> Result<Self> {
        if !(2..=MAX_RANK).contains(&n) {
            return Err(Error::invalid(format!(
                "rank must lie in [2, {MAX_RANK}], got {n}"
            )));
        }
        Ok(Rank(n as u8))
    }

    pub fn get(self) -> usize {
        self.0 as usize
    }

    /// Number of letters `a_i^{±1}`.
    pub fn alphabet_size(self) -> usize {
        2 * self.get()
    }

    pub fn letters(self) -> impl Iterator<Item = Letter> {
        (0..self.alphabet_size() as u8).map(Letter)
    }
}

impl TryFrom<usize> for Rank {
    type Error = Error;
    fn try_from(n: usize) -> Result<Self> {
        Rank::new(n)
    }
}

impl From<Rank> for usize {
    fn from(r: Rank) -> usize {
        r.get()
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A generator `a_i` or its inverse, packed in one byte as `2 (i - 1) + [inverse]`.
///
/// The derived order is the canonical letter order `a_1 < a_1^{-1} < a_2 < ...`
/// used for canonical rotations of cyclic words.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(u8);

impl Letter {
    /// `generator` is 1-based.
    pub fn new(generator: usize, inverse: bool) -> Result<Self> {
        if generator == 0 || generator > MAX_RANK {
            return Err(Error::invalid(format!(
                "generator index {generator} outside [1, {MAX_RANK}]"
            )));
        }
        Ok(Letter(((generator - 1) as u8) << 1 | inverse as u8))
    }

    pub fn generator_letter(generator: usize) -> Result<Self> {
        Letter::new(generator, false)
    }

    #[inline]
    pub fn code(self) -> u8 {
        self.0
    }

    #[inline]
    pub(crate) fn from_code(code: u8) -> Self {
        Letter(code)
    }

    /// 1-based generator index.
    #[inline]
    pub fn generator(self) -> usize {
        (self.0 >> 1) as usize + 1
    }

    /// 0-based generator index.
    #[inline]
    pub fn index(self) -> usize {
        (self.0 >> 1) as usize
    }

    #[inline]
    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    #[inline]
    pub fn inverse(self) -> Letter {
        Letter(self.0 ^ 1)
    }

    #[inline]
    pub fn within(self, rank: Rank) -> bool {
        self.index() < rank.get()
    }

    pub fn from_char(c: char) -> Result<Self> {
        match c {
            'a'..='p' => Letter::new(c as usize - 'a' as usize + 1, false),
            'A'..='P' => Letter::new(c as usize - 'A' as usize + 1, true),
            _ => Err(Error::invalid(format!(
                "'{c}' is not a letter (expected a..p or A..P)"
            ))),
        }
    }

    pub fn to_char(self) -> char {
        let base = if self.is_inverse() { b'A' } else { b'a' };
        (base + self.index() as u8) as char
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}
