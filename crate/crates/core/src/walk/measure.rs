use rand::RngCore;

use crate::error::{Error, Result};
use crate::freegroup::{Automorphism, ReducedWord};

const WEIGHT_TOLERANCE: f64 = 1e-12;

/// Elements a measure can charge: anything with an exact inverse.
pub trait GroupElement: Clone + PartialEq {
    fn inverse_element(&self) -> Self;
}

impl GroupElement for Automorphism {
    fn inverse_element(&self) -> Self {
        self.invert()
    }
}

impl GroupElement for ReducedWord {
    fn inverse_element(&self) -> Self {
        self.inverse()
    }
}

/// A finitely supported probability measure.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSpec<E> {
    atoms: Vec<(E, f64)>,
    cumulative: Vec<f64>,
}

impl<E: GroupElement> MeasureSpec<E> {
    pub fn new(atoms: Vec<(E, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::invalid("a measure needs at least one atom"));
        }
        if let Some((k, (_, w))) = atoms.iter().enumerate().find(|(_, (_, w))| w.is_nan() || *w <= 0.0 || !w.is_finite()) {
            return Err(Error::invalid(format!("atom {k} has weight {w}; weights must be positive")));
        }
        let total: f64 = atoms.iter().map(|(_, w)| w).sum();
        if (total - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(Error::invalid(format!("weights sum to {total}, not 1")));
        }
        let mut acc = 0.0;
        let cumulative = atoms
            .iter()
            .map(|(_, w)| {
                acc += w;
                acc
            })
            .collect();
        Ok(MeasureSpec { atoms, cumulative })
    }

    /// Uniform measure on the given elements.
    pub fn uniform(elements: Vec<E>) -> Result<Self> {
        let w = 1.0 / elements.len().max(1) as f64;
        MeasureSpec::new(elements.into_iter().map(|e| (e, w)).collect())
    }

    pub fn point_mass(e: E) -> Self {
        MeasureSpec::new(vec![(e, 1.0)]).expect("a point mass is a probability measure")
    }

    pub fn atoms(&self) -> &[(E, f64)] {
        &self.atoms
    }

    /// `μ̌(g) = μ(g⁻¹)`.
    pub fn reflected(&self) -> Self {
        MeasureSpec {
            atoms: self
                .atoms
                .iter()
                .map(|(e, w)| (e.inverse_element(), *w))
                .collect(),
            cumulative: self.cumulative.clone(),
        }
    }

    /// Index of the atom selected by one 64-bit draw.
    ///
    /// The top 53 bits give `u ∈ [0, 1)`; the atom is the first whose
    /// cumulative weight exceeds `u`, and the last atom absorbs rounding.
    #[inline]
    pub fn sample_index(&self, rng: &mut impl RngCore) -> usize {
        let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        self.cumulative
            .partition_point(|&c| c <= u)
            .min(self.atoms.len() - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freegroup::{Elementary, Rank, Sign};
    use rand::SeedableRng;

    fn word(s: &str) -> ReducedWord {
        s.parse().unwrap()
    }

    #[test]
    fn validation() {
        assert!(MeasureSpec::<ReducedWord>::new(vec![]).is_err());
        assert!(MeasureSpec::new(vec![(word("a"), 0.5), (word("b"), 0.4)]).is_err());
        assert!(MeasureSpec::new(vec![(word("a"), 1.0), (word("b"), 0.0)]).is_err());
        assert!(MeasureSpec::new(vec![(word("a"), 0.5), (word("b"), 0.5)]).is_ok());
        assert!(MeasureSpec::uniform(vec![word("a"), word("A"), word("b")]).is_ok());
    }

    #[test]
    fn reflection() {
        let mu = MeasureSpec::uniform(vec![word("a"), word("A"), word("b"), word("B")]).unwrap();
        let mut reflected: Vec<String> = mu.reflected().atoms().iter().map(|(e, _)| e.to_string()).collect();
        let mut original: Vec<String> = mu.atoms().iter().map(|(e, _)| e.to_string()).collect();
        reflected.sort();
        original.sort();
        assert_eq!(reflected, original);

        let r2 = Rank::new(2).unwrap();
        let phi = Automorphism::elementary(r2, Elementary::right_multiply(1, 2, Sign::Plus).unwrap()).unwrap();
        let point = MeasureSpec::point_mass(phi.clone());
        assert!(point.reflected().atoms()[0].0.same_images(&phi.invert()));
        assert!(point.reflected().reflected().atoms()[0].0.same_images(&phi));
    }

    #[test]
    fn weights_preserved_under_reflection() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let k = rand::Rng::random_range(&mut rng, 1..6);
            let raw: Vec<f64> = (0..k).map(|_| rand::Rng::random_range(&mut rng, 0.1..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let atoms: Vec<(ReducedWord, f64)> = raw
                .iter()
                .enumerate()
                .map(|(i, w)| (word(["a", "ab", "bA", "aab", "B"][i]), w / total))
                .collect();
            let mu = MeasureSpec::new(atoms).unwrap();
            let r = mu.reflected();
            for ((e, w), (f, v)) in mu.atoms().iter().zip(r.atoms()) {
                assert_eq!(w, v);
                assert_eq!(&e.inverse(), f);
            }
        }
    }

    #[test]
    fn sampling_matches_weights() {
        let mu = MeasureSpec::new(vec![(word("a"), 0.25), (word("b"), 0.75)]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let hits = (0..100_000).filter(|_| mu.sample_index(&mut rng) == 0).count();
        assert!((hits as f64 / 1e5 - 0.25).abs() < 0.01);
    }
}
