use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

use super::letter::{Letter, Rank};

/// A freely reduced word: no letter is followed by its inverse.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ReducedWord {
    letters: Vec<Letter>,
}

/// Appends `x` to an already reduced buffer, cancelling against the last letter.
#[inline]
pub(crate) fn push_reduced(buf: &mut Vec<Letter>, x: Letter) {
    if buf.last() == Some(&x.inverse()) {
        buf.pop();
    } else {
        buf.push(x);
    }
}

/// Freely reduces `raw`, rejecting letters outside the rank.
pub fn reduce(raw: &[Letter], rank: Rank) -> Result<ReducedWord> {
    let mut buf = Vec::with_capacity(raw.len());
    for (pos, &x) in raw.iter().enumerate() {
        if !x.within(rank) {
            return Err(Error::invalid(format!(
                "letter {x} at position {pos} exceeds rank {rank}"
            )));
        }
        push_reduced(&mut buf, x);
    }
    Ok(ReducedWord { letters: buf })
}

impl ReducedWord {
    pub fn empty() -> Self {
        ReducedWord::default()
    }

    pub fn letter(x: Letter) -> Self {
        ReducedWord { letters: vec![x] }
    }

    /// Caller guarantees the letters are reduced.
    pub(crate) fn from_reduced_unchecked(letters: Vec<Letter>) -> Self {
        debug_assert!(letters.windows(2).all(|p| p[1] != p[0].inverse()));
        ReducedWord { letters }
    }

    /// Parses the literal syntax `a..p` / `A..P` (inverses); `"1"` or `""` is the identity.
    pub fn parse(s: &str, rank: Rank) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "1" {
            return Ok(ReducedWord::empty());
        }
        let raw = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(Letter::from_char)
            .collect::<Result<Vec<_>>>()?;
        reduce(&raw, rank)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn max_generator(&self) -> usize {
        self.letters.iter().map(|l| l.generator()).max().unwrap_or(0)
    }

    pub fn check_rank(&self, rank: Rank) -> Result<()> {
        match self.letters.iter().position(|l| !l.within(rank)) {
            Some(pos) => Err(Error::invalid(format!(
                "letter {} at position {pos} exceeds rank {rank}",
                self.letters[pos]
            ))),
            None => Ok(()),
        }
    }

    pub fn inverse(&self) -> ReducedWord {
        ReducedWord {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// Reduced product `self · other`.
    pub fn mul(&self, other: &ReducedWord) -> ReducedWord {
        let mut buf = Vec::with_capacity(self.len() + other.len());
        buf.extend_from_slice(&self.letters);
        for &x in &other.letters {
            push_reduced(&mut buf, x);
        }
        ReducedWord { letters: buf }
    }

    /// Length of the longest common prefix.
    pub fn common_prefix(&self, other: &ReducedWord) -> usize {
        common_prefix(&self.letters, &other.letters)
    }

    pub fn prefix(&self, len: usize) -> ReducedWord {
        ReducedWord {
            letters: self.letters[..len.min(self.len())].to_vec(),
        }
    }

    /// Occurrences of `a_i^{±1}` for each generator.
    pub fn generator_counts(&self, rank: Rank) -> Vec<u64> {
        let mut counts = vec![0u64; rank.get()];
        for l in &self.letters {
            counts[l.index()] += 1;
        }
        counts
    }
}

pub(crate) fn common_prefix(u: &[Letter], v: &[Letter]) -> usize {
    u.iter().zip(v).take_while(|(x, y)| x == y).count()
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for l in &self.letters {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ReducedWord({self})")
    }
}

/// Parses at the maximal rank; use [`ReducedWord::parse`] to enforce a rank.
impl FromStr for ReducedWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ReducedWord::parse(s, Rank::new(super::letter::MAX_RANK)?)
    }
}
