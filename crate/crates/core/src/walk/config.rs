use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freegroup::{Automorphism, CyclicWord, Elementary, Rank, ReducedWord};
use crate::outer_space::RosePointSpec;
use crate::tree::BoundaryPoint;

use super::measure::MeasureSpec;

pub const DEFAULT_WORD_CAP: usize = 1 << 24;
pub const DEFAULT_RESYNC_CAP: usize = 1 << 16;
pub const DEFAULT_SEARCH_DEPTH: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Outer,
    Tree,
}

/// How an outer walk tracks `Φ_n(g)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// Exact cyclic words, capped at `word_cap` letters.
    #[default]
    Words,
    /// Rank 2, primitive classes only: lengths from abelianized images,
    /// cross-checked against exact words while those stay below `resync_cap`.
    Abelian,
}

/// A measure atom as written in a config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub element: ElementSpec,
    pub weight: f64,
}

/// An outer automorphism as a trace of generator ids or an images literal
/// such as `"a>ab; b>b"`; in tree mode, a word.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementSpec {
    Trace(Vec<Elementary>),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CheckpointSpec {
    List(Vec<usize>),
    Every { every: usize },
}

/// Knobs of the statistical layer; every tolerance has a recorded default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisSpec {
    /// Deviation threshold as a multiple of the drift estimate.
    pub epsilon_factor: f64,
    /// Absolute deviation threshold; overrides `epsilon_factor`.
    pub epsilon: Option<f64>,
    pub deviation_grid: Option<Vec<usize>>,
    /// Index into `tracked` of the class used by the gap diagnostic.
    pub gap_class: usize,
    pub ks_alpha: f64,
    pub class_relative_tolerance: f64,
    pub gap_relative_tolerance: f64,
}

impl Default for AnalysisSpec {
    fn default() -> Self {
        AnalysisSpec {
            epsilon_factor: 0.2,
            epsilon: None,
            deviation_grid: None,
            gap_class: 0,
            ks_alpha: 0.01,
            class_relative_tolerance: 0.05,
            gap_relative_tolerance: 0.2,
        }
    }
}

/// Tree-lab settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeLabSpec {
    pub x_points: Vec<BoundaryPoint>,
    pub h2_x: BoundaryPoint,
    #[serde(default = "one")]
    pub h2_alpha: f64,
    pub h2_grid: Vec<usize>,
    /// Step at which tracking distances are summarized.
    pub tracking_step: Option<usize>,
}

fn one() -> f64 {
    1.0
}

fn default_word_cap() -> usize {
    DEFAULT_WORD_CAP
}

fn default_resync_cap() -> usize {
    DEFAULT_RESYNC_CAP
}

fn default_search_depth() -> usize {
    DEFAULT_SEARCH_DEPTH
}

/// The experiment file as written on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub rank: Rank,
    pub mode: Mode,
    pub measure: Vec<AtomSpec>,
    pub horizon: usize,
    pub trials: usize,
    pub checkpoints: CheckpointSpec,
    pub seed: u64,
    #[serde(default)]
    pub tracked: Vec<String>,
    #[serde(default)]
    pub backend: Backend,
    #[serde(default = "default_word_cap")]
    pub word_cap: usize,
    #[serde(default = "default_resync_cap")]
    pub resync_cap: usize,
    #[serde(default = "default_search_depth")]
    pub literal_search_depth: usize,
    #[serde(default)]
    pub analysis: AnalysisSpec,
    #[serde(default)]
    pub rose_points: Vec<RosePointSpec>,
    #[serde(default)]
    pub tree_lab: Option<TreeLabSpec>,
}

/// The validated walk parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkConfig {
    pub horizon: usize,
    pub trials: usize,
    pub master_seed: u64,
    pub checkpoints: Vec<usize>,
    pub word_cap: usize,
    pub resync_cap: usize,
    pub backend: Backend,
}

impl WalkConfig {
    pub fn new(horizon: usize, trials: usize, master_seed: u64, checkpoints: Vec<usize>) -> Result<Self> {
        let cfg = WalkConfig {
            horizon,
            trials,
            master_seed,
            checkpoints,
            word_cap: DEFAULT_WORD_CAP,
            resync_cap: DEFAULT_RESYNC_CAP,
            backend: Backend::Words,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    pub fn with_word_cap(mut self, cap: usize) -> Self {
        self.word_cap = cap;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::invalid("horizon must be at least 1"));
        }
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        if self.checkpoints.is_empty() {
            return Err(Error::invalid("checkpoint list is empty"));
        }
        if self.checkpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("checkpoints must be strictly increasing"));
        }
        if self.checkpoints[0] == 0 || *self.checkpoints.last().unwrap() > self.horizon {
            return Err(Error::invalid(format!(
                "checkpoints must lie in 1..={}",
                self.horizon
            )));
        }
        Ok(())
    }

    /// Position of `n` in the checkpoint list.
    pub fn checkpoint_index(&self, n: usize) -> Option<usize> {
        self.checkpoints.binary_search(&n).ok()
    }
}

/// A measure on the group a config's mode walks on.
#[derive(Debug, Clone)]
pub enum Walk {
    Outer {
        rank: Rank,
        measure: MeasureSpec<Automorphism>,
        tracked: Vec<CyclicWord>,
    },
    Tree {
        rank: Rank,
        measure: MeasureSpec<ReducedWord>,
        tracked: Vec<BoundaryPoint>,
    },
}

/// A parsed and validated experiment.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub walk: Walk,
    pub walk_config: WalkConfig,
}

/// 1-based line and column of the first occurrence of `"key"` in `text`.
fn locate(text: &str, key: &str) -> (usize, usize) {
    let needle = format!("\"{key}\"");
    match text.find(&needle) {
        Some(offset) => {
            let before = &text[..offset];
            let line = before.matches('\n').count() + 1;
            let column = offset - before.rfind('\n').map_or(0, |p| p + 1) + 1;
            (line, column)
        }
        None => (1, 1),
    }
}

fn config_error(text: &str, key: &str, err: Error) -> Error {
    let (line, column) = locate(text, key);
    let message = match err {
        Error::InvalidInput(m) => m,
        other => other.to_string(),
    };
    Error::Config {
        line,
        column,
        message: format!("{key}: {message}"),
    }
}

impl ElementSpec {
    fn to_automorphism(&self, rank: Rank, search_depth: usize) -> Result<Automorphism> {
        match self {
            ElementSpec::Trace(trace) => Automorphism::from_trace(rank, trace),
            ElementSpec::Text(s) if s.contains('>') => Automorphism::parse_literal(s, rank, search_depth),
            ElementSpec::Text(s) => Automorphism::from_trace(rank, &[s.parse()?]),
        }
    }

    fn to_word(&self, rank: Rank) -> Result<ReducedWord> {
        match self {
            ElementSpec::Text(s) => ReducedWord::parse(s, rank),
            ElementSpec::Trace(_) => Err(Error::invalid("tree-mode atoms are words, not generator traces")),
        }
    }
}

impl ExperimentConfig {
    pub fn walk_config(&self) -> Result<WalkConfig> {
        let checkpoints = match &self.checkpoints {
            CheckpointSpec::List(v) => v.clone(),
            CheckpointSpec::Every { every } => {
                if *every == 0 {
                    return Err(Error::invalid("checkpoint spacing must be positive"));
                }
                let mut v: Vec<usize> = (1..=self.horizon / every).map(|k| k * every).collect();
                if v.last() != Some(&self.horizon) {
                    v.push(self.horizon);
                }
                v
            }
        };
        let cfg = WalkConfig {
            horizon: self.horizon,
            trials: self.trials,
            master_seed: self.seed,
            checkpoints,
            word_cap: self.word_cap,
            resync_cap: self.resync_cap,
            backend: self.backend,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn build_walk(&self) -> Result<Walk> {
        self.build_walk_keyed().map_err(|(_, e)| e)
    }

    /// Like [`build_walk`](Self::build_walk), naming the offending field.
    fn build_walk_keyed(&self) -> std::result::Result<Walk, (&'static str, Error)> {
        let at = |key: &'static str| move |e: Error| (key, e);
        match self.mode {
            Mode::Outer => {
                let atoms = self
                    .measure
                    .iter()
                    .map(|a| Ok((a.element.to_automorphism(self.rank, self.literal_search_depth)?, a.weight)))
                    .collect::<Result<Vec<_>>>()
                    .map_err(at("measure"))?;
                let measure = MeasureSpec::new(atoms).map_err(at("measure"))?;
                let tracked = self
                    .tracked
                    .iter()
                    .map(|s| CyclicWord::parse_nontrivial(s, self.rank))
                    .collect::<Result<Vec<_>>>()
                    .map_err(at("tracked"))?;
                if tracked.is_empty() {
                    return Err(("tracked", Error::invalid("at least one tracked class is required")));
                }
                if self.backend == Backend::Abelian {
                    super::abelian::check_supported(self.rank, &tracked).map_err(at("backend"))?;
                }
                Ok(Walk::Outer {
                    rank: self.rank,
                    measure,
                    tracked,
                })
            }
            Mode::Tree => {
                let atoms = self
                    .measure
                    .iter()
                    .map(|a| Ok((a.element.to_word(self.rank)?, a.weight)))
                    .collect::<Result<Vec<_>>>()
                    .map_err(at("measure"))?;
                let measure = MeasureSpec::new(atoms).map_err(at("measure"))?;
                let tracked = self
                    .tracked
                    .iter()
                    .map(|s| BoundaryPoint::parse(s, self.rank))
                    .collect::<Result<Vec<_>>>()
                    .map_err(at("tracked"))?;
                if let Some(x) = tracked.iter().find(|x| x.is_truncated()) {
                    return Err(("tracked", Error::invalid(format!("'{x}' is truncated; tracked points must be exact"))));
                }
                if self.backend != Backend::Words {
                    return Err(("backend", Error::invalid("tree mode has no alternative backend")));
                }
                Ok(Walk::Tree {
                    rank: self.rank,
                    measure,
                    tracked,
                })
            }
        }
    }
}

impl Experiment {
    /// Parses and validates a config; every error carries a line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Config {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        if config.horizon == 0 {
            return Err(config_error(text, "horizon", Error::invalid("must be at least 1")));
        }
        if config.trials == 0 {
            return Err(config_error(text, "trials", Error::invalid("must be at least 1")));
        }
        let walk_config = config
            .walk_config()
            .map_err(|e| config_error(text, "checkpoints", e))?;
        let walk = config
            .build_walk_keyed()
            .map_err(|(key, e)| config_error(text, key, e))?;
        if let Walk::Outer { tracked, .. } = &walk {
            if config.analysis.gap_class >= tracked.len() {
                return Err(config_error(
                    text,
                    "gap_class",
                    Error::invalid(format!("index {} out of range", config.analysis.gap_class)),
                ));
            }
        }
        for (k, p) in config.rose_points.iter().enumerate() {
            p.build(config.rank)
                .map_err(|e| config_error(text, "rose_points", Error::invalid(format!("point {k}: {e}"))))?;
        }
        if let Some(lab) = &config.tree_lab {
            if config.mode != Mode::Tree {
                return Err(config_error(text, "tree_lab", Error::invalid("only valid in tree mode")));
            }
            for x in lab.x_points.iter().chain([&lab.h2_x]) {
                x.check_rank(config.rank).map_err(|e| config_error(text, "tree_lab", e))?;
            }
        }
        Ok(Experiment {
            config,
            walk,
            walk_config,
        })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Experiment::from_json(&text)
    }
}
