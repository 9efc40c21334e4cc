use crate::error::Result;
use crate::freegroup::{Letter, ReducedWord};
use crate::tree::{prefix_with_boundary, BoundaryPoint};

use super::config::WalkConfig;
use super::measure::MeasureSpec;
use super::rng::trial_rng;
use super::{CheckpointValues, PathRecord};

/// Common prefix of a word and a boundary point, stopping at the certified depth.
fn prefix_len(w: &[Letter], xi: &BoundaryPoint) -> Option<usize> {
    for (k, &x) in w.iter().enumerate() {
        match xi.letter(k) {
            Some(y) if y == x => continue,
            Some(_) => return Some(k),
            None => return None,
        }
    }
    Some(w.len())
}

/// One sample path of the left walk `g_n = s_n ⋯ s_1` on `F_N`, observed
/// through `g_n⁻¹·o`, which grows on the right: `g_n⁻¹ = g_{n−1}⁻¹ s_n⁻¹`.
///
/// At each checkpoint: `κ = |g_n|`, `β(g_n, x)` for every tracked `x`, and the
/// distance from `g_n⁻¹·o` to the ray towards the path's limit point. The
/// limit point is the final position, certified up to the shortest length
/// the position reached during the last tenth of the walk.
pub fn sample_tree(
    measure: &MeasureSpec<ReducedWord>,
    tracked: &[BoundaryPoint],
    config: &WalkConfig,
    trial: usize,
) -> Result<PathRecord> {
    let mut rng = trial_rng(config.master_seed, trial as u64);
    let inverses: Vec<Vec<Letter>> = measure
        .atoms()
        .iter()
        .map(|(s, _)| s.inverse().into_letters())
        .collect();
    let window_start = config.horizon - config.horizon / 10;
    let mut position: Vec<Letter> = Vec::with_capacity(config.horizon);
    let mut low_water = usize::MAX;
    let mut snapshots: Vec<Vec<Letter>> = Vec::with_capacity(config.checkpoints.len());
    let mut out = Vec::with_capacity(config.checkpoints.len());
    let mut next_cp = 0;
    for step in 1..=config.horizon {
        let k = measure.sample_index(&mut rng);
        let mut floor = position.len();
        for &x in &inverses[k] {
            if position.last().is_some_and(|&l| l == x.inverse()) {
                position.pop();
                floor = floor.min(position.len());
            } else {
                position.push(x);
            }
        }
        if step > window_start {
            low_water = low_water.min(floor);
        }
        if next_cp < config.checkpoints.len() && config.checkpoints[next_cp] == step {
            let depth = position.len();
            let sigma = tracked
                .iter()
                .map(|x| {
                    let c = prefix_len(&position, x).expect("tracked points are exact");
                    (depth as i64 - 2 * c as i64) as f64
                })
                .collect();
            out.push(CheckpointValues {
                step,
                kappa: depth as f64,
                sigma,
                tracking: None,
            });
            snapshots.push(position.clone());
            next_cp += 1;
        }
    }
    let certified = low_water.min(position.len());
    let boundary = BoundaryPoint::truncated(ReducedWord::from_reduced_unchecked(position), certified)?;
    for (cp, snap) in out.iter_mut().zip(&snapshots) {
        let w = ReducedWord::from_reduced_unchecked(snap.clone());
        cp.tracking = prefix_with_boundary(&w, &boundary)
            .ok()
            .map(|c| (w.len() - c) as u64);
    }
    Ok(PathRecord {
        trial,
        checkpoints: out,
        boundary: Some(boundary),
    })
}
