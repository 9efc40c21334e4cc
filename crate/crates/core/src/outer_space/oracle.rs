use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::freegroup::{CyclicWord, Letter, Rank};

use super::ratio::{cmp_fractions, LengthRatio};
use super::rose::RosePoint;

/// Enumeration bound on cyclically reduced words.
pub const MAX_ENUMERATED_WORDS: u64 = 20_000_000;

/// Every nontrivial conjugacy class of `F_N` with cyclic length ≤ `max_len`,
/// one canonical representative each. Build once and reuse across queries.
#[derive(Debug, Clone)]
pub struct ClassEnumeration {
    rank: Rank,
    max_len: usize,
    classes: Vec<CyclicWord>,
}

/// Upper bound on cyclically reduced words of length `1..=max_len`.
fn word_bound(rank: Rank, max_len: usize) -> u64 {
    let k = rank.alphabet_size() as u64;
    let mut total: u64 = 0;
    let mut level = k;
    for _ in 0..max_len {
        total = total.saturating_add(level);
        level = level.saturating_mul(k - 1);
    }
    total
}

impl ClassEnumeration {
    pub fn new(rank: Rank, max_len: usize) -> Result<Self> {
        if max_len < 2 {
            return Err(Error::invalid(format!("max_len must be at least 2, got {max_len}")));
        }
        let bound = word_bound(rank, max_len);
        if bound > MAX_ENUMERATED_WORDS {
            return Err(Error::Resource(format!(
                "enumerating cyclic words of length ≤ {max_len} in rank {rank} needs up to {bound} words (limit {MAX_ENUMERATED_WORDS})"
            )));
        }
        let alphabet: Vec<Letter> = rank.letters().collect();
        let mut classes = Vec::new();
        let mut stack: Vec<Letter> = Vec::with_capacity(max_len);
        extend(&alphabet, max_len, &mut stack, &mut classes);
        Ok(ClassEnumeration {
            rank,
            max_len,
            classes,
        })
    }

    pub fn rank(&self) -> Rank {
        self.rank
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn classes(&self) -> &[CyclicWord] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// `max ‖c‖_U / ‖c‖_T` over the classes of the edge loops of T of
    /// combinatorial length ≤ `max_len`, each length computed from the
    /// definition: the loop `w` represents `Ψ_T(w)`.
    pub fn max_ratio(&self, t: &RosePoint, u: &RosePoint) -> Result<LengthRatio> {
        if t.rank() != self.rank || u.rank() != self.rank {
            return Err(Error::invalid(format!(
                "rank mismatch: enumeration of rank {}, points of rank {} and {}",
                self.rank,
                t.rank(),
                u.rank()
            )));
        }
        let u_inv = u.marking().invert();
        let mut best: Option<(u128, u128)> = None;
        let (mut class, mut bu) = (Vec::new(), Vec::new());
        for w in &self.classes {
            t.marking().apply_cyclic_into(w.letters(), &mut class);
            u_inv.apply_cyclic_into(&class, &mut bu);
            let lt = t.weighted_length(w.letters());
            let lu = u.weighted_length(&bu);
            if best.is_none_or(|(pu, pt)| cmp_fractions(lu, lt, pu, pt) == Ordering::Greater) {
                best = Some((lu, lt));
            }
        }
        let (lu, lt) = best.expect("enumeration contains every generator");
        Ok(LengthRatio::new(lu, lt).mul(&LengthRatio::new(t.weights().iter().sum::<u64>(), u.weights().iter().sum::<u64>())))
    }
}

/// Depth-first extension of a reduced word; keeps cyclically reduced words in
/// canonical rotation.
fn extend(alphabet: &[Letter], max_len: usize, stack: &mut Vec<Letter>, out: &mut Vec<CyclicWord>) {
    for &x in alphabet {
        if stack.last().is_some_and(|&l| l == x.inverse()) {
            continue;
        }
        // a canonical word starts with its least letter
        if stack.first().is_some_and(|&f| x < f) {
            continue;
        }
        stack.push(x);
        let cyclically_reduced = stack[0] != x.inverse() || stack.len() == 1;
        if cyclically_reduced && CyclicWord::is_canonical(stack) {
            out.push(CyclicWord::from_word(&crate::freegroup::ReducedWord::from_reduced_unchecked(stack.clone())));
        }
        if stack.len() < max_len {
            extend(alphabet, max_len, stack, out);
        }
        stack.pop();
    }
}

/// `d(T, U)` computed as a truncated sup over every conjugacy class of length ≤ `max_len`.
pub fn brute_force_distance_oracle(t: &RosePoint, u: &RosePoint, max_len: usize) -> Result<f64> {
    Ok(ClassEnumeration::new(t.rank(), max_len)?.max_ratio(t, u)?.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freegroup::{Automorphism, Elementary, Sign};
    use crate::outer_space::rose::lipschitz_ratio;

    #[test]
    fn class_counts_by_length() {
        // class counts by length, frozen from a naive rotation-dedup count
        let e = ClassEnumeration::new(Rank::new(2).unwrap(), 6).unwrap();
        let mut by_len = [0usize; 7];
        for c in e.classes() {
            by_len[c.letters().len()] += 1;
        }
        assert_eq!(&by_len[1..], &[4, 8, 12, 26, 52, 132]);
    }

    #[test]
    fn enumeration_is_canonical_and_distinct() {
        let e = ClassEnumeration::new(Rank::new(3).unwrap(), 5).unwrap();
        let mut seen = std::collections::HashSet::new();
        for c in e.classes() {
            assert_eq!(&CyclicWord::from_word(&c.to_word()), c);
            assert!(seen.insert(c.clone()));
        }
    }

    #[test]
    fn resource_bound_and_minimum_length() {
        assert!(matches!(
            ClassEnumeration::new(Rank::new(4).unwrap(), 12),
            Err(Error::Resource(_))
        ));
        assert!(ClassEnumeration::new(Rank::new(2).unwrap(), 1).is_err());
    }

    #[test]
    fn oracle_on_simple_pairs() {
        let r = Rank::new(2).unwrap();
        let t = RosePoint::unit(r);
        assert_eq!(brute_force_distance_oracle(&t, &t, 12).unwrap(), 0.0);
        let u = RosePoint::from_lengths(&[0.9, 0.1], Automorphism::identity(r)).unwrap();
        let e = ClassEnumeration::new(r, 8).unwrap();
        assert_eq!(e.max_ratio(&t, &u).unwrap(), lipschitz_ratio(&t, &u).unwrap());
        assert_eq!(e.max_ratio(&u, &t).unwrap(), lipschitz_ratio(&u, &t).unwrap());
    }

    #[test]
    fn loops_are_enumerated_in_the_source_rose() {
        // the stretched petal is a b¹⁰ in the standard basis, far beyond max_len
        let r = Rank::new(2).unwrap();
        let step = Automorphism::elementary(r, Elementary::right_multiply(1, 2, Sign::Plus).unwrap()).unwrap();
        let mut phi = Automorphism::identity(r);
        for _ in 0..10 {
            phi = step.compose(&phi).unwrap();
        }
        let t = RosePoint::from_weights(vec![1, 1], phi).unwrap();
        let u = RosePoint::unit(r);
        let e = ClassEnumeration::new(r, 4).unwrap();
        assert_eq!(e.max_ratio(&t, &u).unwrap(), LengthRatio::new(11u32, 1u32));
        assert_eq!(e.max_ratio(&t, &u).unwrap(), lipschitz_ratio(&t, &u).unwrap());
    }
}
