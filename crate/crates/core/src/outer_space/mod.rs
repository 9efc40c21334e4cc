//! Marked roses in outer space with the asymmetric Lipschitz metric.

mod oracle;
mod ratio;
mod rose;

pub use oracle::{brute_force_distance_oracle, ClassEnumeration, MAX_ENUMERATED_WORDS};
pub use ratio::{ln_big, LengthRatio};
pub use rose::{
    base_candidates, kappa, kappa_ratio, length_cocycle, length_cocycle_exact, lipschitz_distance,
    lipschitz_ratio, lipschitz_ratio_over, sym_distance, translation_length, translation_length_exact,
    CandidateSet, LengthLiteral, RosePoint, RosePointSpec,
};
pub(crate) use ratio::cmp_fractions;

#[cfg(test)]
mod properties;
