use std::fmt;

use crate::error::{Error, Result};

use super::letter::{Letter, Rank};
use super::word::ReducedWord;

/// A conjugacy class of `F_N`, stored as the lexicographically least rotation of
/// its cyclically reduced representative.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct CyclicWord {
    letters: Vec<Letter>,
}

/// Number of letter pairs stripped from both ends of a reduced word.
#[inline]
pub(crate) fn cyclic_trim(letters: &[Letter]) -> usize {
    let n = letters.len();
    let mut k = 0;
    while 2 * k + 1 < n && letters[k] == letters[n - 1 - k].inverse() {
        k += 1;
    }
    k
}

/// Start index of the least rotation (Booth's algorithm).
pub(crate) fn least_rotation(s: &[Letter]) -> usize {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    let at = |i: usize| s[i % n];
    let mut fail: Vec<isize> = vec![-1; 2 * n];
    let mut k: usize = 0;
    for j in 1..2 * n {
        let sj = at(j);
        let mut i = fail[j - k - 1];
        while i != -1 && sj != at(k + i as usize + 1) {
            if sj < at(k + i as usize + 1) {
                k = j - i as usize - 1;
            }
            i = fail[i as usize];
        }
        if i == -1 && sj != at(k) {
            if sj < at(k) {
                k = j;
            }
            fail[j - k] = -1;
        } else {
            fail[j - k] = i + 1;
        }
    }
    k % n
}

/// Splits `w = conjugator · core · conjugator⁻¹` with `core` canonically rotated.
pub fn cyclic_reduce(w: &ReducedWord) -> (CyclicWord, ReducedWord) {
    let letters = w.letters();
    let k = cyclic_trim(letters);
    let core = &letters[k..letters.len() - k];
    let r = least_rotation(core);
    let mut rotated = Vec::with_capacity(core.len());
    rotated.extend_from_slice(&core[r..]);
    rotated.extend_from_slice(&core[..r]);
    // core = u v with rotation v u; the conjugator absorbs u.
    let mut conj = letters[..k].to_vec();
    conj.extend_from_slice(&core[..r]);
    (
        CyclicWord { letters: rotated },
        ReducedWord::from_reduced_unchecked(conj),
    )
}

impl CyclicWord {
    pub fn from_word(w: &ReducedWord) -> CyclicWord {
        cyclic_reduce(w).0
    }

    pub fn parse(s: &str, rank: Rank) -> Result<CyclicWord> {
        Ok(CyclicWord::from_word(&ReducedWord::parse(s, rank)?))
    }

    /// Parses and rejects the trivial class.
    pub fn parse_nontrivial(s: &str, rank: Rank) -> Result<CyclicWord> {
        let c = CyclicWord::parse(s, rank)?;
        if c.is_trivial() {
            return Err(Error::invalid(format!("'{s}' is the trivial class")));
        }
        Ok(c)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// The canonical representative, which is itself a reduced word.
    pub fn to_word(&self) -> ReducedWord {
        ReducedWord::from_reduced_unchecked(self.letters.clone())
    }

    pub fn is_trivial(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> CyclicWord {
        CyclicWord::from_word(&self.to_word().inverse())
    }

    /// Is `letters` already the canonical form of a cyclically reduced word?
    pub(crate) fn is_canonical(letters: &[Letter]) -> bool {
        let r = least_rotation(letters);
        // periodic words have several least rotations
        r == 0 || letters[r..].iter().chain(&letters[..r]).eq(letters.iter())
    }
}

/// `‖g‖`: the length of the cyclically reduced representative.
pub fn cyclic_length(g: &CyclicWord) -> usize {
    g.letters.len()
}

impl fmt::Display for CyclicWord {
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

impl fmt::Debug for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CyclicWord({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn rank() -> Rank {
        Rank::new(3).unwrap()
    }

    fn w(s: &str) -> ReducedWord {
        ReducedWord::parse(s, rank()).unwrap()
    }

    fn naive_least_rotation(s: &[Letter]) -> Vec<Letter> {
        (0..s.len().max(1))
            .map(|r| {
                let mut v = s[r.min(s.len())..].to_vec();
                v.extend_from_slice(&s[..r.min(s.len())]);
                v
            })
            .min()
            .unwrap()
    }

    fn random_word(rng: &mut impl Rng, len: usize) -> ReducedWord {
        let raw: Vec<Letter> = (0..len)
            .map(|_| Letter::from_code(rng.random_range(0..6u8)))
            .collect();
        super::super::word::reduce(&raw, rank()).unwrap()
    }

    #[test]
    fn spec_examples() {
        let (c, conj) = cyclic_reduce(&w("abA"));
        assert_eq!((c.to_string(), conj.to_string()), ("b".into(), "a".into()));
        let (c, conj) = cyclic_reduce(&w("ab"));
        assert_eq!((c.to_string(), conj.to_string()), ("ab".into(), "1".into()));
        let (c, conj) = cyclic_reduce(&w("Bab"));
        assert_eq!((c.to_string(), conj.to_string()), ("a".into(), "B".into()));
    }

    #[test]
    fn lengths() {
        assert_eq!(cyclic_length(&CyclicWord::parse("b", rank()).unwrap()), 1);
        assert_eq!(cyclic_length(&CyclicWord::default()), 0);
        assert!(CyclicWord::parse_nontrivial("aA", rank()).is_err());
    }

    #[test]
    fn decomposition_reassembles_and_rotation_is_least() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5_000 {
            let g = random_word(&mut rng, 30);
            let (c, conj) = cyclic_reduce(&g);
            let back = conj.mul(&c.to_word()).mul(&conj.inverse());
            assert_eq!(back, g);
            let l = c.letters();
            if !l.is_empty() {
                assert_ne!(l[0], l[l.len() - 1].inverse());
            }
            assert_eq!(l, naive_least_rotation(l).as_slice());
        }
    }

    #[test]
    fn conjugacy_class_is_well_defined() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        for _ in 0..5_000 {
            let g = random_word(&mut rng, 20);
            let c = random_word(&mut rng, 8);
            let conj = c.mul(&g).mul(&c.inverse());
            assert_eq!(CyclicWord::from_word(&conj), CyclicWord::from_word(&g));
        }
    }

    #[test]
    fn length_is_inversion_symmetric_on_10k() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for _ in 0..10_000 {
            let g = CyclicWord::from_word(&random_word(&mut rng, 25));
            assert_eq!(cyclic_length(&g), cyclic_length(&g.inverse()));
        }
    }

    #[test]
    fn periodic_words_rotate_to_least() {
        let c = CyclicWord::parse("baba", rank()).unwrap();
        assert_eq!(c.to_string(), "abab");
        assert!(CyclicWord::is_canonical(c.letters()));
    }
}
