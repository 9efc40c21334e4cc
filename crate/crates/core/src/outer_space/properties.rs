use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::freegroup::{Automorphism, CyclicWord, Rank};
use crate::random::{random_automorphism, random_class, random_rose};

fn r(n: usize) -> Rank {
    Rank::new(n).unwrap()
}

fn ratio_of(phi: &Automorphism, g: &CyclicWord) -> LengthRatio {
    let (num, den) = length_cocycle_exact(phi, g).unwrap();
    LengthRatio::new(num, den)
}

#[test]
fn candidates_agree_with_exhaustive_sup_in_rank_two() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let classes = ClassEnumeration::new(r(2), 12).unwrap();
    for _ in 0..200 {
        let steps = rng.random_range(0..6);
        let t = random_rose(&mut rng, r(2), steps);
        let u = random_rose(&mut rng, r(2), steps);
        assert_eq!(classes.max_ratio(&t, &u).unwrap(), lipschitz_ratio(&t, &u).unwrap(), "{t:?} {u:?}");
    }
}

#[test]
fn candidates_agree_with_exhaustive_sup_in_rank_three() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let classes = ClassEnumeration::new(r(3), 8).unwrap();
    for _ in 0..40 {
        let t = random_rose(&mut rng, r(3), 4);
        let u = random_rose(&mut rng, r(3), 4);
        assert_eq!(classes.max_ratio(&t, &u).unwrap(), lipschitz_ratio(&t, &u).unwrap());
    }
}

#[test]
fn oracle_is_monotone_in_length() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let t = random_rose(&mut rng, r(2), 5);
    let u = random_rose(&mut rng, r(2), 5);
    let values: Vec<LengthRatio> = (2..=9)
        .map(|l| ClassEnumeration::new(r(2), l).unwrap().max_ratio(&t, &u).unwrap())
        .collect();
    assert!(values.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn action_is_isometric() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    for _ in 0..1_000 {
        let rank = r(rng.random_range(2..=4));
        let t = random_rose(&mut rng, rank, 4);
        let u = random_rose(&mut rng, rank, 4);
        let phi = random_automorphism(&mut rng, rank, 6);
        assert_eq!(
            lipschitz_ratio(&t.act(&phi).unwrap(), &u.act(&phi).unwrap()).unwrap(),
            lipschitz_ratio(&t, &u).unwrap()
        );
    }
}

#[test]
fn asymmetric_triangle_inequality() {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    for _ in 0..10_000 {
        let rank = r(rng.random_range(2..=3));
        let t = random_rose(&mut rng, rank, 3);
        let u = random_rose(&mut rng, rank, 3);
        let v = random_rose(&mut rng, rank, 3);
        let direct = lipschitz_ratio(&t, &v).unwrap();
        let via = lipschitz_ratio(&t, &u).unwrap().mul(&lipschitz_ratio(&u, &v).unwrap());
        assert!(direct <= via);
        assert!(direct >= LengthRatio::one());
    }
}

#[test]
fn symmetrized_distance_dominates() {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    for _ in 0..1_000 {
        let t = random_rose(&mut rng, r(2), 4);
        let u = random_rose(&mut rng, r(2), 4);
        let s = sym_distance(&t, &u).unwrap();
        assert_eq!(s, sym_distance(&u, &t).unwrap());
        assert!(s >= lipschitz_distance(&t, &u).unwrap());
        assert!(s >= lipschitz_distance(&u, &t).unwrap());
    }
}

#[test]
fn kappa_is_subadditive() {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    for _ in 0..10_000 {
        let rank = r(rng.random_range(2..=4));
        let phi = random_automorphism(&mut rng, rank, 5);
        let psi = random_automorphism(&mut rng, rank, 5);
        let lhs = kappa_ratio(&phi.compose(&psi).unwrap());
        assert!(lhs <= kappa_ratio(&phi).mul(&kappa_ratio(&psi)));
        assert!(kappa(&phi) >= 0.0);
    }
}

#[test]
fn cocycle_identity_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    for _ in 0..10_000 {
        let rank = r(rng.random_range(2..=4));
        let phi = random_automorphism(&mut rng, rank, 5);
        let psi = random_automorphism(&mut rng, rank, 5);
        let g = random_class(&mut rng, rank, 10);
        let psi_g = psi.apply_cyclic(&g).unwrap();
        let lhs = ratio_of(&phi.compose(&psi).unwrap(), &g);
        let rhs = ratio_of(&phi, &psi_g).mul(&ratio_of(&psi, &g));
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn cocycle_is_bounded_by_kappa() {
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    for _ in 0..10_000 {
        let rank = r(rng.random_range(2..=4));
        let phi = random_automorphism(&mut rng, rank, 6);
        let g = random_class(&mut rng, rank, 12);
        let s = ratio_of(&phi, &g);
        assert!(s <= kappa_ratio(&phi));
        assert!(s.mul(&kappa_ratio(&phi.invert())) >= LengthRatio::one());
    }
}

#[test]
fn translation_length_is_a_class_function() {
    let mut rng = ChaCha8Rng::seed_from_u64(110);
    for _ in 0..2_000 {
        let rank = r(rng.random_range(2..=4));
        let t = random_rose(&mut rng, rank, 4);
        let g = crate::random::random_word(&mut rng, rank, 12);
        if g.is_empty() {
            continue;
        }
        let h = crate::random::random_word(&mut rng, rank, 6);
        let class = CyclicWord::from_word(&g);
        let conj = CyclicWord::from_word(&h.mul(&g).mul(&h.inverse()));
        let len = translation_length_exact(&class, &t).unwrap();
        assert_eq!(translation_length_exact(&conj, &t).unwrap(), len);
        assert_eq!(translation_length_exact(&class.inverse(), &t).unwrap(), len);
        assert!(len.0 > 0);
    }
}
