//! Random instances for the invariant suites and tests.

use rand::distr::uniform::SampleRange;
use rand::Rng;

use crate::freegroup::{reduce, Automorphism, CyclicWord, Elementary, Letter, Rank, ReducedWord};
use crate::outer_space::RosePoint;
use crate::tree::BoundaryPoint;

pub fn random_automorphism(rng: &mut impl Rng, rank: Rank, steps: usize) -> Automorphism {
    let gens = Elementary::all(rank);
    let trace: Vec<Elementary> = (0..steps).map(|_| gens[rng.random_range(0..gens.len())]).collect();
    Automorphism::from_trace(rank, &trace).expect("generators of the same rank")
}

/// Free reduction of a uniform word of `len` letters, so possibly shorter.
pub fn random_word(rng: &mut impl Rng, rank: Rank, len: usize) -> ReducedWord {
    let raw: Vec<Letter> = (0..len)
        .map(|_| Letter::from_code(rng.random_range(0..rank.alphabet_size() as u8)))
        .collect();
    reduce(&raw, rank).expect("letters within the rank")
}

pub fn random_word_in(rng: &mut impl Rng, rank: Rank, len: impl SampleRange<usize>) -> ReducedWord {
    let len = rng.random_range(len);
    random_word(rng, rank, len)
}

/// A nontrivial class; `len` must be positive.
pub fn random_class(rng: &mut impl Rng, rank: Rank, len: usize) -> CyclicWord {
    assert!(len > 0, "nontrivial classes need a positive length");
    loop {
        let c = CyclicWord::from_word(&random_word(rng, rank, len));
        if !c.is_trivial() {
            return c;
        }
    }
}

pub fn random_rose(rng: &mut impl Rng, rank: Rank, steps: usize) -> RosePoint {
    let weights = (0..rank.get()).map(|_| rng.random_range(1..=20u64)).collect();
    RosePoint::from_weights(weights, random_automorphism(rng, rank, steps)).expect("positive weights")
}

/// An eventually periodic boundary point with short preperiod and period.
pub fn random_boundary(rng: &mut impl Rng, rank: Rank, pre: usize, per: usize) -> BoundaryPoint {
    loop {
        let p = random_word_in(rng, rank, 0..=pre);
        let q = random_word_in(rng, rank, 1..=per);
        if let Ok(b) = BoundaryPoint::periodic(p, q) {
            return b;
        }
    }
}
