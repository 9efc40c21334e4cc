use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freegroup::{Automorphism, CyclicWord, Elementary, Letter, Rank, ReducedWord};

use super::ratio::{cmp_fractions, LengthRatio};

/// Float lengths are rationalized on this grid.
const FLOAT_SCALE: f64 = 1e12;
const SUM_TOLERANCE: f64 = 1e-12;

/// A marked rose `Ψ·T_ℓ` of covolume one.
///
/// Edge lengths are stored exactly as `weights[i] / Σ weights`, so the volume
/// is exactly one. The marking acts on the left by `Φ·T = T·Φ⁻¹`: the
/// translation length of `g` at this point is `‖Ψ⁻¹(g)‖_ℓ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RosePoint {
    weights: Vec<u64>,
    total: u64,
    marking: Automorphism,
}

impl RosePoint {
    pub fn from_weights(weights: Vec<u64>, marking: Automorphism) -> Result<Self> {
        if weights.len() != marking.rank().get() {
            return Err(Error::invalid(format!(
                "{} edge lengths for a rank {} marking",
                weights.len(),
                marking.rank()
            )));
        }
        if weights.contains(&0) {
            return Err(Error::invalid("edge lengths must be positive"));
        }
        let total = weights
            .iter()
            .try_fold(0u64, |acc, &w| acc.checked_add(w))
            .ok_or_else(|| Error::invalid("edge length numerators overflow"))?;
        Ok(RosePoint {
            weights,
            total,
            marking,
        })
    }

    /// Lengths must be positive and sum to 1 within `1e-12`.
    pub fn from_lengths(lengths: &[f64], marking: Automorphism) -> Result<Self> {
        let sum: f64 = lengths.iter().sum();
        if lengths.iter().any(|&l| l.is_nan() || l <= 0.0 || !l.is_finite()) {
            return Err(Error::invalid(format!("edge lengths must be positive, got {lengths:?}")));
        }
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::invalid(format!("edge lengths sum to {sum}, not 1")));
        }
        let weights = lengths
            .iter()
            .map(|&l| (l * FLOAT_SCALE).round() as u64)
            .collect::<Vec<_>>();
        RosePoint::from_weights(weights, marking)
    }

    /// Exact rational lengths `p_i / q_i`; they must sum to exactly 1.
    pub fn from_rationals(lengths: &[(u64, u64)], marking: Automorphism) -> Result<Self> {
        if lengths.iter().any(|&(p, q)| p == 0 || q == 0) {
            return Err(Error::invalid("edge lengths must be positive rationals"));
        }
        let lcm = lengths.iter().try_fold(1u64, |acc, &(_, q)| {
            let g = gcd(acc, q);
            acc.checked_mul(q / g)
        });
        let lcm = lcm.ok_or_else(|| Error::invalid("denominators too large"))?;
        let weights: Vec<u64> = lengths.iter().map(|&(p, q)| p * (lcm / q)).collect();
        let total: u64 = weights.iter().sum();
        if total != lcm {
            return Err(Error::invalid(format!(
                "edge lengths sum to {total}/{lcm}, not 1"
            )));
        }
        RosePoint::from_weights(weights, marking)
    }

    /// The basepoint `o`: every edge has length `1/N`, identity marking.
    pub fn unit(rank: Rank) -> Self {
        RosePoint::from_weights(vec![1; rank.get()], Automorphism::identity(rank)).expect("valid unit rose")
    }

    pub fn rank(&self) -> Rank {
        self.marking.rank()
    }

    pub fn marking(&self) -> &Automorphism {
        &self.marking
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.weights
            .iter()
            .map(|&w| w as f64 / self.total as f64)
            .collect()
    }

    /// `Φ·T`: the marking becomes `Φ ∘ Ψ`.
    pub fn act(&self, phi: &Automorphism) -> Result<RosePoint> {
        Ok(RosePoint {
            weights: self.weights.clone(),
            total: self.total,
            marking: phi.compose(&self.marking)?,
        })
    }

    /// Weighted letter count of a cyclically reduced word in the rose's own basis.
    pub(crate) fn weighted_length(&self, letters: &[Letter]) -> u128 {
        letters.iter().map(|l| self.weights[l.index()] as u128).sum()
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Config form: `{"lengths": [..], "marking_trace": [..]}`. A length is a
/// number or a `"p/q"` string; all-rational input is kept exact.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RosePointSpec {
    pub lengths: Vec<LengthLiteral>,
    #[serde(default)]
    pub marking_trace: Vec<Elementary>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum LengthLiteral {
    Float(f64),
    Rational(String),
}

impl RosePointSpec {
    pub fn build(&self, rank: Rank) -> Result<RosePoint> {
        let marking = Automorphism::from_trace(rank, &self.marking_trace)?;
        let all_rational = self
            .lengths
            .iter()
            .all(|l| matches!(l, LengthLiteral::Rational(_)));
        if all_rational {
            let parsed = self
                .lengths
                .iter()
                .map(|l| match l {
                    LengthLiteral::Rational(s) => parse_rational(s),
                    LengthLiteral::Float(_) => unreachable!(),
                })
                .collect::<Result<Vec<_>>>()?;
            RosePoint::from_rationals(&parsed, marking)
        } else {
            let floats = self
                .lengths
                .iter()
                .map(|l| match l {
                    LengthLiteral::Float(x) => Ok(*x),
                    LengthLiteral::Rational(s) => parse_rational(s).map(|(p, q)| p as f64 / q as f64),
                })
                .collect::<Result<Vec<_>>>()?;
            RosePoint::from_lengths(&floats, marking)
        }
    }
}

fn parse_rational(s: &str) -> Result<(u64, u64)> {
    let bad = || Error::invalid(format!("'{s}' is not a rational 'p/q'"));
    let (p, q) = s.split_once('/').unwrap_or((s, "1"));
    Ok((p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?))
}

/// Base candidates of the identity-marked rose: petals `a_i` and figure-eights
/// `a_i a_j`, `a_i a_j⁻¹` (`i < j`). A rose has one vertex, so no barbells.
pub fn base_candidates(rank: Rank) -> Vec<CyclicWord> {
    let n = rank.get();
    let gen = |i: usize| Letter::new(i, false).expect("in range");
    let mut out: Vec<CyclicWord> = (1..=n)
        .map(|i| CyclicWord::from_word(&ReducedWord::letter(gen(i))))
        .collect();
    for i in 1..=n {
        for j in i + 1..=n {
            for inv in [false, true] {
                let w = ReducedWord::letter(gen(i)).mul(&ReducedWord::letter(Letter::new(j, inv).expect("in range")));
                out.push(CyclicWord::from_word(&w));
            }
        }
    }
    out
}

/// The candidate loops of a marked rose, expressed in the standard basis.
///
/// The Lipschitz sup over all classes is attained on this finite set (the rose
/// case of White's theorem; candidates on a general graph also include barbells).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSet {
    pub words: Vec<CyclicWord>,
}

impl CandidateSet {
    pub fn for_point(t: &RosePoint) -> CandidateSet {
        let words = base_candidates(t.rank())
            .iter()
            .map(|c| t.marking().apply_cyclic(c).expect("rank matches"))
            .collect();
        CandidateSet { words }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

fn check_ranks(t: &RosePoint, u: &RosePoint) -> Result<()> {
    if t.rank() != u.rank() {
        return Err(Error::invalid(format!(
            "rank mismatch: {} vs {}",
            t.rank(),
            u.rank()
        )));
    }
    Ok(())
}

/// `‖g‖_T` as an exact fraction `numerator / Σ weights`.
pub fn translation_length_exact(g: &CyclicWord, t: &RosePoint) -> Result<(u128, u64)> {
    if g.is_trivial() {
        return Err(Error::invalid("translation length of the trivial class"));
    }
    let pulled = t.marking().invert().apply_cyclic(g)?;
    Ok((t.weighted_length(pulled.letters()), t.total))
}

/// `‖g‖_T = Σ ℓ_i · #(a_i^{±1} in Ψ⁻¹(g))`.
pub fn translation_length(g: &CyclicWord, t: &RosePoint) -> Result<f64> {
    let (num, den) = translation_length_exact(g, t)?;
    Ok(num as f64 / den as f64)
}

/// Maximal stretch `‖c‖_U / ‖c‖_T` over `base` pushed forward by T's marking.
pub fn lipschitz_ratio_over(t: &RosePoint, u: &RosePoint, base: &[CyclicWord]) -> Result<LengthRatio> {
    check_ranks(t, u)?;
    // ‖Ψ_T(c)‖_U = ‖Ψ_U⁻¹ Ψ_T (c)‖_{ℓ_U}
    let chi = u.marking().invert().compose(t.marking())?;
    let mut best: Option<(u128, u128)> = None;
    let mut buf = Vec::new();
    for c in base {
        let lt = t.weighted_length(c.letters());
        chi.apply_cyclic_into(c.letters(), &mut buf);
        let lu = u.weighted_length(&buf);
        if best.is_none_or(|(bu, bt)| cmp_fractions(lu, lt, bu, bt) == Ordering::Greater) {
            best = Some((lu, lt));
        }
    }
    let (lu, lt) = best.ok_or_else(|| Error::invalid("empty candidate list"))?;
    // (lu / W_U) / (lt / W_T)
    Ok(LengthRatio::new(lu, lt).mul(&LengthRatio::new(t.total, u.total)))
}

/// `exp d(T, U)` as an exact ratio.
pub fn lipschitz_ratio(t: &RosePoint, u: &RosePoint) -> Result<LengthRatio> {
    lipschitz_ratio_over(t, u, &base_candidates(t.rank()))
}

/// Asymmetric Lipschitz distance `d(T, U) = log max_c ‖c‖_U / ‖c‖_T`.
pub fn lipschitz_distance(t: &RosePoint, u: &RosePoint) -> Result<f64> {
    Ok(lipschitz_ratio(t, u)?.ln())
}

pub fn sym_distance(t: &RosePoint, u: &RosePoint) -> Result<f64> {
    let forward = lipschitz_ratio(t, u)?;
    let backward = lipschitz_ratio(u, t)?;
    Ok(forward.max(backward).ln())
}

/// `exp κ(Φ)` with `κ(Φ) = d(Φ·o, o) = log max_w ‖Φ(w)‖ / ‖w‖` over base candidates.
pub fn kappa_ratio(phi: &Automorphism) -> LengthRatio {
    let mut best: Option<(u128, u128)> = None;
    let mut buf = Vec::new();
    for w in base_candidates(phi.rank()) {
        phi.apply_cyclic_into(w.letters(), &mut buf);
        let (num, den) = (buf.len() as u128, w.letters().len() as u128);
        if best.is_none_or(|(bn, bd)| cmp_fractions(num, den, bn, bd) == Ordering::Greater) {
            best = Some((num, den));
        }
    }
    let (num, den) = best.expect("candidate set is nonempty");
    LengthRatio::new(num, den)
}

pub fn kappa(phi: &Automorphism) -> f64 {
    kappa_ratio(phi).ln()
}

/// `(‖Φ(g)‖, ‖g‖)`.
pub fn length_cocycle_exact(phi: &Automorphism, g: &CyclicWord) -> Result<(u64, u64)> {
    if g.is_trivial() {
        return Err(Error::invalid("length cocycle of the trivial class"));
    }
    Ok((phi.image_length(g)? as u64, g.letters().len() as u64))
}

/// `σ(Φ, g) = log(‖Φ(g)‖ / ‖g‖)`.
pub fn length_cocycle(phi: &Automorphism, g: &CyclicWord) -> Result<f64> {
    let (num, den) = length_cocycle_exact(phi, g)?;
    Ok(LengthRatio::new(num, den).ln())
}
