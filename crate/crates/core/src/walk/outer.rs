use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};

use crate::error::{Error, Result};
use crate::freegroup::{Automorphism, CyclicWord, Letter, Rank};
use crate::outer_space::{base_candidates, cmp_fractions, LengthRatio};

use super::abelian::{abelianize, length_of, BigMatrix2, Matrix2};
use super::config::{Backend, WalkConfig};
use super::measure::MeasureSpec;
use super::rng::trial_rng;
use super::{CheckpointValues, PathRecord};

/// Fraction of (trial, checkpoint) pairs recomputed from scratch: one in this many.
const SPOT_CHECK_EVERY: usize = 100;

fn spot_checked(trial: usize, checkpoint: usize, checkpoints: usize) -> bool {
    (trial * checkpoints + checkpoint).is_multiple_of(SPOT_CHECK_EVERY)
}

fn resource(trial: usize, step: usize, len: usize, cap: usize) -> Error {
    Error::Resource(format!(
        "trial {trial}, step {step}: word length {len} exceeds the cap of {cap} letters"
    ))
}

fn violation(trial: usize, step: usize, class: &CyclicWord) -> Error {
    Error::Internal(format!(
        "trial {trial}, step {step}: σ(Φ_n, {class}) exceeds κ(Φ_n)"
    ))
}

fn mismatch(trial: usize, step: usize, what: &str) -> Error {
    Error::Internal(format!(
        "trial {trial}, step {step}: incremental and from-scratch {what} disagree"
    ))
}

/// `Φ_n = s_n ∘ … ∘ s_1` rebuilt from the drawn increments.
fn rebuild(rank: Rank, measure: &MeasureSpec<Automorphism>, increments: &[u32]) -> Result<Automorphism> {
    let trace: Vec<_> = increments
        .iter()
        .rev()
        .flat_map(|&k| measure.atoms()[k as usize].0.trace().iter().copied())
        .collect();
    Automorphism::from_trace(rank, &trace)
}

/// Best ratio `num/den` over (length, base length) pairs.
fn max_ratio<I: Iterator<Item = (u128, u128)>>(pairs: I) -> (u128, u128) {
    pairs
        .reduce(|best, p| {
            if cmp_fractions(p.0, p.1, best.0, best.1) == Ordering::Greater {
                p
            } else {
                best
            }
        })
        .expect("candidate set is nonempty")
}

/// One sample path of the left walk on `Out(F_N)` tracking exact cyclic words.
pub fn sample_outer_words(
    rank: Rank,
    measure: &MeasureSpec<Automorphism>,
    tracked: &[CyclicWord],
    config: &WalkConfig,
    trial: usize,
) -> Result<PathRecord> {
    let mut rng = trial_rng(config.master_seed, trial as u64);
    let candidates = base_candidates(rank);
    let n_cand = candidates.len();
    let base_len: Vec<u128> = candidates
        .iter()
        .chain(tracked)
        .map(|c| c.letters().len() as u128)
        .collect();
    let mut words: Vec<Vec<Letter>> = candidates
        .iter()
        .chain(tracked)
        .map(|c| c.letters().to_vec())
        .collect();
    let mut buf = Vec::new();
    let mut increments: Vec<u32> = Vec::with_capacity(config.horizon);
    let mut out = Vec::with_capacity(config.checkpoints.len());
    let mut next_cp = 0;
    for step in 1..=config.horizon {
        let k = measure.sample_index(&mut rng);
        increments.push(k as u32);
        let s = &measure.atoms()[k].0;
        for w in words.iter_mut() {
            s.apply_cyclic_into(w, &mut buf);
            std::mem::swap(w, &mut buf);
            if w.len() > config.word_cap {
                return Err(resource(trial, step, w.len(), config.word_cap));
            }
        }
        if config.checkpoints[next_cp] != step {
            continue;
        }
        let (kn, kd) = max_ratio((0..n_cand).map(|i| (words[i].len() as u128, base_len[i])));
        let mut sigma = Vec::with_capacity(tracked.len());
        for (j, class) in tracked.iter().enumerate() {
            let (num, den) = (words[n_cand + j].len() as u128, base_len[n_cand + j]);
            if cmp_fractions(num, den, kn, kd) == Ordering::Greater {
                return Err(violation(trial, step, class));
            }
            sigma.push(LengthRatio::new(num, den).ln());
        }
        if spot_checked(trial, next_cp, config.checkpoints.len()) {
            let phi = rebuild(rank, measure, &increments)?;
            for (w, c) in words.iter().zip(candidates.iter().chain(tracked)) {
                if phi.image_length(c)? != w.len() {
                    return Err(mismatch(trial, step, "images"));
                }
            }
        }
        out.push(CheckpointValues {
            step,
            kappa: LengthRatio::new(kn, kd).ln(),
            sigma,
            tracking: None,
        });
        next_cp += 1;
        if next_cp == config.checkpoints.len() {
            break;
        }
    }
    Ok(PathRecord {
        trial,
        checkpoints: out,
        boundary: None,
    })
}

/// Rank 2 sample path tracking abelianized images of primitive classes.
///
/// Exact words are carried alongside while every one of them stays within
/// `resync_cap` letters, and the two length computations must agree.
pub fn sample_outer_abelian(
    rank: Rank,
    measure: &MeasureSpec<Automorphism>,
    tracked: &[CyclicWord],
    config: &WalkConfig,
    trial: usize,
) -> Result<PathRecord> {
    let matrices = measure
        .atoms()
        .iter()
        .map(|(phi, _)| Matrix2::of(phi))
        .collect::<Result<Vec<_>>>()?;
    let mut rng = trial_rng(config.master_seed, trial as u64);
    let candidates = base_candidates(rank);
    let n_cand = candidates.len();
    let classes: Vec<&CyclicWord> = candidates.iter().chain(tracked).collect();
    let base_len: Vec<BigUint> = classes.iter().map(|c| BigUint::from(c.letters().len())).collect();
    let start: Vec<[BigInt; 2]> = classes.iter().map(|c| abelianize(c)).collect();
    let mut vectors = start.clone();
    let mut words: Option<Vec<Vec<Letter>>> = Some(classes.iter().map(|c| c.letters().to_vec()).collect());
    let mut buf = Vec::new();
    let mut product = BigMatrix2::identity();
    let mut out = Vec::with_capacity(config.checkpoints.len());
    let mut next_cp = 0;
    for step in 1..=config.horizon {
        let k = measure.sample_index(&mut rng);
        for v in vectors.iter_mut() {
            matrices[k].apply(v);
        }
        product.left_mul(&matrices[k]);
        if let Some(ws) = words.as_mut() {
            let s = &measure.atoms()[k].0;
            let mut too_long = false;
            for (w, v) in ws.iter_mut().zip(&vectors) {
                s.apply_cyclic_into(w, &mut buf);
                std::mem::swap(w, &mut buf);
                if BigUint::from(w.len()) != length_of(v) {
                    return Err(mismatch(trial, step, "abelian and word lengths"));
                }
                too_long |= w.len() > config.resync_cap;
            }
            if too_long {
                words = None;
            }
        }
        if config.checkpoints[next_cp] != step {
            continue;
        }
        let lengths: Vec<BigUint> = vectors.iter().map(length_of).collect();
        let ratio = |i: usize| LengthRatio::new(lengths[i].clone(), base_len[i].clone());
        let kappa = (0..n_cand).map(ratio).max().expect("candidate set is nonempty");
        let mut sigma = Vec::with_capacity(tracked.len());
        for (j, class) in tracked.iter().enumerate() {
            let s = ratio(n_cand + j);
            if s > kappa {
                return Err(violation(trial, step, class));
            }
            sigma.push(s.ln());
        }
        if spot_checked(trial, next_cp, config.checkpoints.len()) {
            for (v, v0) in vectors.iter().zip(&start) {
                if &product.apply(v0) != v {
                    return Err(mismatch(trial, step, "abelian images"));
                }
            }
        }
        out.push(CheckpointValues {
            step,
            kappa: kappa.ln(),
            sigma,
            tracking: None,
        });
        next_cp += 1;
        if next_cp == config.checkpoints.len() {
            break;
        }
    }
    Ok(PathRecord {
        trial,
        checkpoints: out,
        boundary: None,
    })
}

pub fn sample_outer(
    rank: Rank,
    measure: &MeasureSpec<Automorphism>,
    tracked: &[CyclicWord],
    config: &WalkConfig,
    trial: usize,
) -> Result<PathRecord> {
    match config.backend {
        Backend::Words => sample_outer_words(rank, measure, tracked, config, trial),
        Backend::Abelian => sample_outer_abelian(rank, measure, tracked, config, trial),
    }
}
