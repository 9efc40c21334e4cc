//! Experiment commands and their on-disk artifacts.
//!
//! Every command writes fixed-header CSV tables, a `summary.json` mirroring
//! them, and a `manifest.json` with the config hash, the seed and the crate
//! version. Nothing schedule-dependent is written, so reruns are
//! byte-identical whatever the thread count.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::outer_space::{lipschitz_ratio, RosePoint};
use crate::stats::{
    check_sigma_bounded, clt_report, deviation_curve, drift_estimate, kappa_sigma_gap, quantile_sorted, CltReport,
    DriftEstimate, Observable,
};
use crate::tree::{centering_check, h2_tail_estimate};
use crate::walk::{run_experiment, Experiment, PathRecord, Walk};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Drift,
    Clt,
    Deviation,
    Distance,
    TreeLab,
    Gap,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::Drift,
        Command::Clt,
        Command::Deviation,
        Command::Distance,
        Command::TreeLab,
        Command::Gap,
    ];
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Drift => "drift",
            Command::Clt => "clt",
            Command::Deviation => "deviation",
            Command::Distance => "distance",
            Command::TreeLab => "tree-lab",
            Command::Gap => "gap",
        })
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.to_string() == s)
            .ok_or_else(|| Error::invalid(format!("unknown command '{s}'")))
    }
}

/// What a command produced.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub summary: Value,
    /// Human-readable result lines.
    pub messages: Vec<String>,
    pub files: Vec<PathBuf>,
}

struct Output {
    dir: PathBuf,
    files: Vec<(String, String)>,
}

impl Output {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        Ok(Output {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        self.files.push((name.to_string(), hex::encode(Sha256::digest(bytes))));
        Ok(())
    }

    fn csv(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let path = self.dir.join(name);
        w.write_record(header).map_err(|e| Error::io(&path, e))?;
        for row in rows {
            w.write_record(&row).map_err(|e| Error::io(&path, e))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::io(&path, e))?;
        self.write(name, &bytes)
    }

    fn json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Internal(e.to_string()))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn labels(walk: &Walk) -> Vec<String> {
    match walk {
        Walk::Outer { tracked, .. } => tracked.iter().map(|g| g.to_string()).collect(),
        Walk::Tree { tracked, .. } => tracked.iter().map(|x| x.to_string()).collect(),
    }
}

fn sample(exp: &Experiment, threads: usize) -> Result<Vec<PathRecord>> {
    let records = run_experiment(&exp.walk, &exp.walk_config, threads)?;
    check_sigma_bounded(&records)?;
    Ok(records)
}

fn drift_rows(d: &DriftEstimate) -> Vec<Vec<String>> {
    std::iter::once(vec!["kappa".to_string(), num(d.lambda_hat), num(d.std_error)])
        .chain(
            d.per_class
                .iter()
                .map(|c| vec![c.class.clone(), num(c.estimate.value), num(c.estimate.stderr)]),
        )
        .collect()
}

fn clt_messages(label: &str, r: &CltReport) -> String {
    match r.ks {
        Some(ks) => format!(
            "{label}: V̂ = {:.4}, KS statistic {:.4}, p = {:.4}",
            r.variance_hat, ks.statistic, ks.p_value
        ),
        None => format!("{label}: degenerate distribution, V̂ = 0"),
    }
}

/// Runs `command` on a parsed experiment and writes its artifacts to `out`.
/// `config_bytes` is the config file as read, hashed into the manifest.
pub fn run_command(
    command: Command,
    exp: &Experiment,
    config_bytes: &[u8],
    out: &Path,
    threads: usize,
) -> Result<RunOutcome> {
    let mut output = Output::new(out)?;
    let mut messages = Vec::new();
    let summary = match command {
        Command::Drift => {
            let records = sample(exp, threads)?;
            let d = drift_estimate(&records, &labels(&exp.walk))?;
            output.csv("drift.csv", &["class", "lambda_hat", "stderr"], drift_rows(&d))?;
            messages.push(format!("λ̂ = {:.6} ± {:.6} (n = {})", d.lambda_hat, d.std_error, d.horizon));
            for c in &d.per_class {
                messages.push(format!("  {}: {:.6} ± {:.6}", c.class, c.estimate.value, c.estimate.stderr));
            }
            for (a, b) in &d.disagreements {
                messages.push(format!("  classes {a} and {b} disagree by more than 3 standard errors"));
            }
            json!({ "command": "drift", "drift": d })
        }
        Command::Clt => {
            let records = sample(exp, threads)?;
            let names = labels(&exp.walk);
            let d = drift_estimate(&records, &names)?;
            let main = clt_report(&records, Observable::Kappa, d.lambda_hat)?;
            messages.push(clt_messages("kappa", &main));
            let mut per_class = Vec::new();
            for (j, c) in d.per_class.iter().enumerate() {
                let r = clt_report(&records, Observable::Sigma(j), c.estimate.value)?;
                messages.push(clt_messages(&c.class, &r));
                per_class.push(json!({ "class": c.class, "report": r }));
            }
            output.csv(
                "clt.csv",
                &["trial", "standardized_value"],
                main.standardized_samples
                    .iter()
                    .enumerate()
                    .map(|(t, v)| vec![t.to_string(), num(*v)]),
            )?;
            json!({
                "command": "clt",
                "drift": d,
                "clt": main,
                // finitely many classes probe uniformity; they cannot establish it
                "per_class_non_exhaustive": per_class,
            })
        }
        Command::Deviation => {
            let records = sample(exp, threads)?;
            let d = drift_estimate(&records, &labels(&exp.walk))?;
            let a = &exp.config.analysis;
            let epsilon = a.epsilon.unwrap_or(a.epsilon_factor * d.lambda_hat);
            let grid = a.deviation_grid.clone().unwrap_or_else(|| exp.walk_config.checkpoints.clone());
            let curve = deviation_curve(&records, Observable::Kappa, d.lambda_hat, epsilon, &grid)?;
            output.csv(
                "deviation.csv",
                &["n", "epsilon", "probability"],
                curve
                    .points
                    .iter()
                    .map(|p| vec![p.n.to_string(), num(epsilon), num(p.probability)]),
            )?;
            messages.push(format!(
                "ε = {epsilon:.6}: P at n = {} is {:.4}; fitted decay rate {}",
                curve.points.last().map_or(0, |p| p.n),
                curve.final_probability(),
                curve.decay_rate_fit.map_or("n/a".to_string(), |r| format!("{r:.4}"))
            ));
            json!({ "command": "deviation", "drift": d, "deviation": curve })
        }
        Command::Gap => {
            let records = sample(exp, threads)?;
            let class = exp.config.analysis.gap_class;
            let gap = kappa_sigma_gap(&records, class)?;
            output.csv(
                "gap.csv",
                &["trial", "sup_gap"],
                gap.sup_gap.iter().enumerate().map(|(t, g)| vec![t.to_string(), num(*g)]),
            )?;
            messages.push(format!(
                "median sup gap: {:.4} at H = {}, {:.4} at H/2 = {} (relative change {:.3})",
                gap.at_horizon.q50, gap.horizon, gap.at_half.q50, gap.half_horizon, gap.relative_change
            ));
            json!({ "command": "gap", "class": labels(&exp.walk).get(class), "gap": gap })
        }
        Command::Distance => {
            let points = exp
                .config
                .rose_points
                .iter()
                .map(|p| p.build(exp.config.rank))
                .collect::<Result<Vec<RosePoint>>>()?;
            if points.len() < 2 {
                return Err(Error::invalid("distance needs at least two rose_points"));
            }
            let mut rows = Vec::new();
            let mut pairs = Vec::new();
            for (i, t) in points.iter().enumerate() {
                for (j, u) in points.iter().enumerate() {
                    if i == j {
                        continue;
                    }
                    let r = lipschitz_ratio(t, u)?.reduced();
                    let ratio = format!("{}/{}", r.numerator(), r.denominator());
                    let d = r.ln();
                    messages.push(format!("d(T{i}, T{j}) = log({ratio}) = {d}"));
                    rows.push(vec![i.to_string(), j.to_string(), ratio.clone(), num(d)]);
                    pairs.push(json!({ "from": i, "to": j, "ratio": ratio, "distance": d }));
                }
            }
            output.csv("distance.csv", &["from", "to", "ratio", "distance"], rows)?;
            json!({ "command": "distance", "distances": pairs })
        }
        Command::TreeLab => tree_lab(exp, threads, &mut output, &mut messages)?,
    };
    output.json("summary.json", &summary)?;
    let manifest = json!({
        "command": command.to_string(),
        "config_sha256": hex::encode(Sha256::digest(config_bytes)),
        "seed": exp.walk_config.master_seed,
        "versions": { "outwalk": env!("CARGO_PKG_VERSION") },
        "outputs": output
            .files
            .iter()
            .map(|(f, h)| json!({ "file": f, "sha256": h }))
            .collect::<Vec<_>>(),
    });
    output.json("manifest.json", &manifest)?;
    let files = output.files.iter().map(|(f, _)| out.join(f)).collect();
    Ok(RunOutcome {
        summary,
        messages,
        files,
    })
}

fn tree_lab(exp: &Experiment, threads: usize, output: &mut Output, messages: &mut Vec<String>) -> Result<Value> {
    let Walk::Tree { measure, .. } = &exp.walk else {
        return Err(Error::invalid("tree-lab needs a tree-mode config"));
    };
    let lab = exp
        .config
        .tree_lab
        .as_ref()
        .ok_or_else(|| Error::invalid("tree-lab needs a tree_lab section"))?;
    let records = sample(exp, threads)?;
    let d = drift_estimate(&records, &labels(&exp.walk))?;
    let samples: Vec<_> = records.iter().filter_map(|r| r.boundary.clone()).collect();
    let centering = centering_check(measure, &lab.x_points, &samples, d.estimate())?;
    output.csv(
        "centering.csv",
        &["x", "estimate", "stderr", "z_score"],
        centering.rows.iter().map(|r| {
            vec![
                r.x.to_string(),
                num(r.estimate.value),
                num(r.estimate.stderr),
                num(r.z_score),
            ]
        }),
    )?;
    messages.push(format!("λ̂ = {:.6} ± {:.6}", d.lambda_hat, d.std_error));
    for r in &centering.rows {
        messages.push(format!(
            "  E[β₀(·, {})] = {:.6} ± {:.6} ({:.2} standard errors from λ̂)",
            r.x, r.estimate.value, r.estimate.stderr, r.z_score
        ));
    }
    let tail = h2_tail_estimate(&lab.h2_x, lab.h2_alpha, &lab.h2_grid, &samples)?;
    output.csv(
        "h2.csv",
        &["n", "threshold", "probability"],
        tail.points
            .iter()
            .map(|p| vec![p.n.to_string(), p.threshold.to_string(), num(p.probability)]),
    )?;
    messages.push(format!(
        "tail of (x|y) at x = {}: fitted decay rate {}",
        lab.h2_x,
        tail.decay_rate.map_or("n/a".to_string(), |r| format!("{r:.4}"))
    ));
    let step = lab.tracking_step.unwrap_or(exp.walk_config.checkpoints[0]);
    let mut tracking = Vec::new();
    for r in &records {
        let cp = r
            .at_step(step)
            .ok_or_else(|| Error::invalid(format!("tracking_step {step} is not a checkpoint")))?;
        tracking.push(cp.tracking);
    }
    output.csv(
        "tracking.csv",
        &["trial", "tracking_distance"],
        tracking
            .iter()
            .enumerate()
            .map(|(t, v)| vec![t.to_string(), v.map_or(String::new(), |x| x.to_string())]),
    )?;
    let mut decided: Vec<f64> = tracking.iter().flatten().map(|&v| v as f64).collect();
    decided.sort_by(f64::total_cmp);
    let p99 = quantile_sorted(&decided, 0.99);
    messages.push(format!(
        "tracking distance at n = {step}: 99th percentile {p99} over {} decided paths",
        decided.len()
    ));
    Ok(json!({
        "command": "tree-lab",
        "drift": d,
        "centering": centering,
        "h2_tail": tail,
        "tracking": {
            "step": step,
            "decided": decided.len(),
            "undecided": tracking.len() - decided.len(),
            "p99": p99,
        },
    }))
}
