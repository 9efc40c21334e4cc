//! Exact algebra of the free group `F_N`: reduced words, conjugacy classes and
//! automorphisms built from elementary generators.

mod automorphism;
mod cyclic;
mod elementary;
mod letter;
mod word;

pub use automorphism::Automorphism;
pub use cyclic::{cyclic_length, cyclic_reduce, CyclicWord};
pub use elementary::{Elementary, Sign};
pub use letter::{Letter, Rank, MAX_RANK};
pub use word::{reduce, ReducedWord};

pub(crate) use word::{common_prefix, push_reduced};
