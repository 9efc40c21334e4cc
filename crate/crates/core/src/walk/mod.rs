//! Deterministic parallel Monte Carlo for left random walks.

pub mod abelian;
mod config;
mod measure;
mod outer;
mod rng;
mod tree_walk;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::BoundaryPoint;

pub use config::{
    AnalysisSpec, AtomSpec, Backend, CheckpointSpec, ElementSpec, Experiment, ExperimentConfig, Mode, TreeLabSpec,
    Walk, WalkConfig, DEFAULT_RESYNC_CAP, DEFAULT_SEARCH_DEPTH, DEFAULT_WORD_CAP,
};
pub use measure::{GroupElement, MeasureSpec};
pub use outer::{sample_outer, sample_outer_abelian, sample_outer_words};
pub use rng::{step_rng, trial_rng};
pub use tree_walk::sample_tree;

/// Observables at one checkpoint `n`.
///
/// Outer mode: `kappa = κ(Φ_n)` and `sigma[j] = σ(Φ_n, g_j)`. Tree mode:
/// `kappa = |g_n|`, `sigma[j] = β(g_n, x_j)`, and `tracking` is the distance
/// from `g_n⁻¹·o` to the ray towards the path's limit point when decidable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointValues {
    pub step: usize,
    pub kappa: f64,
    pub sigma: Vec<f64>,
    pub tracking: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathRecord {
    pub trial: usize,
    pub checkpoints: Vec<CheckpointValues>,
    /// Tree mode: the certified approximation of the limit point.
    pub boundary: Option<BoundaryPoint>,
}

impl PathRecord {
    pub fn at_step(&self, step: usize) -> Option<&CheckpointValues> {
        self.checkpoints
            .binary_search_by_key(&step, |c| c.step)
            .ok()
            .map(|i| &self.checkpoints[i])
    }

    pub fn last(&self) -> &CheckpointValues {
        self.checkpoints.last().expect("records have at least one checkpoint")
    }
}

impl Walk {
    pub fn sample_path(&self, config: &WalkConfig, trial: usize) -> Result<PathRecord> {
        match self {
            Walk::Outer {
                rank,
                measure,
                tracked,
            } => sample_outer(*rank, measure, tracked, config, trial),
            Walk::Tree { measure, tracked, .. } => sample_tree(measure, tracked, config, trial),
        }
    }

    /// The same walk driven by the reflected measure.
    pub fn reflected(&self) -> Walk {
        match self {
            Walk::Outer {
                rank,
                measure,
                tracked,
            } => Walk::Outer {
                rank: *rank,
                measure: measure.reflected(),
                tracked: tracked.clone(),
            },
            Walk::Tree {
                rank,
                measure,
                tracked,
            } => Walk::Tree {
                rank: *rank,
                measure: measure.reflected(),
                tracked: tracked.clone(),
            },
        }
    }
}

/// Runs every trial on a pool of `threads` workers (0 = rayon's default).
///
/// Records come back ordered by trial index whatever the schedule; failures
/// are collected and reported together with their trial indices.
pub fn run_experiment(walk: &Walk, config: &WalkConfig, threads: usize) -> Result<Vec<PathRecord>> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    let results: Vec<Result<PathRecord>> = pool.install(|| {
        (0..config.trials)
            .into_par_iter()
            .map(|t| walk.sample_path(config, t))
            .collect()
    });
    let mut records = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(rec) => records.push(rec),
            Err(e) => failures.push(e),
        }
    }
    match failures.len() {
        0 => Ok(records),
        1 => Err(failures.pop().expect("one failure")),
        n => {
            let resource = failures.iter().all(|e| matches!(e, Error::Resource(_)));
            let listed: Vec<String> = failures.iter().take(10).map(|e| e.to_string()).collect();
            let message = format!("{n} trials failed: {}", listed.join("; "));
            Err(if resource {
                Error::Resource(message)
            } else {
                Error::Internal(message)
            })
        }
    }
}
