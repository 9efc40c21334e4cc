//! Statistics over sample paths: drift, CLT standardization with a
//! Kolmogorov–Smirnov test, deviation curves and the κ–σ gap diagnostic.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::walk::{CheckpointValues, PathRecord};

pub const MIN_DRIFT_TRIALS: usize = 30;
pub const MIN_CLT_TRIALS: usize = 500;
/// Combined standard errors beyond which two drift estimates are flagged.
pub const DISAGREEMENT_Z: f64 = 3.0;
const KOLMOGOROV_TERMS: usize = 100;

/// A sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn from_samples(xs: &[f64]) -> Result<Self> {
        if xs.is_empty() {
            return Err(Error::invalid("no samples"));
        }
        let (mean, var) = mean_var(xs);
        Ok(Estimate {
            value: mean,
            stderr: (var / xs.len() as f64).sqrt(),
        })
    }

    /// `|a − b|` in units of the combined standard error.
    pub fn z_distance(&self, other: &Estimate) -> f64 {
        let diff = (self.value - other.value).abs();
        let se = self.stderr.hypot(other.stderr);
        if se > 0.0 {
            diff / se
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// Mean and unbiased variance (0 for a single sample).
fn mean_var(xs: &[f64]) -> (f64, f64) {
    let m = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / m;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0)
    } else {
        0.0
    };
    (mean, var)
}

/// Which recorded value to aggregate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Observable {
    /// `κ(Φ_n)` in outer mode, `|g_n|` in tree mode.
    Kappa,
    /// `σ(Φ_n, g_j)` or `β(g_n, x_j)` for the `j`-th tracked class or point.
    Sigma(usize),
}

impl Observable {
    pub fn value(self, cp: &CheckpointValues) -> Result<f64> {
        match self {
            Observable::Kappa => Ok(cp.kappa),
            Observable::Sigma(j) => cp
                .sigma
                .get(j)
                .copied()
                .ok_or_else(|| Error::invalid(format!("observable σ[{j}] is not recorded"))),
        }
    }
}

fn values_at(records: &[PathRecord], obs: Observable, step: usize) -> Result<Vec<f64>> {
    records
        .iter()
        .map(|r| {
            let cp = r
                .at_step(step)
                .ok_or_else(|| Error::invalid(format!("step {step} is not a checkpoint")))?;
            obs.value(cp)
        })
        .collect()
}

fn final_step(records: &[PathRecord]) -> Result<usize> {
    let first = records.first().ok_or_else(|| Error::invalid("no sample paths"))?;
    Ok(first.last().step)
}

/// `σ ≤ κ` at every checkpoint of every path, up to rounding of the logarithms.
pub fn check_sigma_bounded(records: &[PathRecord]) -> Result<()> {
    for r in records {
        for cp in &r.checkpoints {
            for (j, &s) in cp.sigma.iter().enumerate() {
                if s > cp.kappa + 1e-9 * cp.kappa.abs().max(1.0) {
                    return Err(Error::Internal(format!(
                        "trial {}, step {}: σ[{j}] = {s} exceeds κ = {}",
                        r.trial, cp.step, cp.kappa
                    )));
                }
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassDrift {
    pub class: String,
    pub estimate: Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftEstimate {
    /// Drift of `κ`.
    pub lambda_hat: f64,
    pub std_error: f64,
    pub per_class: Vec<ClassDrift>,
    /// Pairs of classes whose estimates differ by more than three combined
    /// standard errors.
    pub disagreements: Vec<(String, String)>,
    /// Largest pairwise class difference relative to `lambda_hat`.
    pub max_relative_spread: f64,
    pub horizon: usize,
    pub trials: usize,
}

impl DriftEstimate {
    pub fn estimate(&self) -> Estimate {
        Estimate {
            value: self.lambda_hat,
            stderr: self.std_error,
        }
    }
}

fn drift_of(records: &[PathRecord], obs: Observable, horizon: usize) -> Result<Estimate> {
    let xs: Vec<f64> = values_at(records, obs, horizon)?
        .into_iter()
        .map(|v| v / horizon as f64)
        .collect();
    Estimate::from_samples(&xs)
}

/// Drift estimated as the mean of value-at-horizon over horizon, for `κ` and
/// for every tracked class. `labels` names the tracked classes in order.
pub fn drift_estimate(records: &[PathRecord], labels: &[String]) -> Result<DriftEstimate> {
    if records.len() < MIN_DRIFT_TRIALS {
        return Err(Error::invalid(format!(
            "drift estimation needs at least {MIN_DRIFT_TRIALS} trials, got {}",
            records.len()
        )));
    }
    let horizon = final_step(records)?;
    let kappa = drift_of(records, Observable::Kappa, horizon)?;
    let per_class = labels
        .iter()
        .enumerate()
        .map(|(j, label)| {
            Ok(ClassDrift {
                class: label.clone(),
                estimate: drift_of(records, Observable::Sigma(j), horizon)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut disagreements = Vec::new();
    let mut spread = 0.0f64;
    for (i, a) in per_class.iter().enumerate() {
        for b in &per_class[i + 1..] {
            if a.estimate.z_distance(&b.estimate) > DISAGREEMENT_Z {
                disagreements.push((a.class.clone(), b.class.clone()));
            }
            spread = spread.max((a.estimate.value - b.estimate.value).abs());
        }
    }
    let max_relative_spread = if spread == 0.0 {
        0.0
    } else {
        spread / kappa.value.abs()
    };
    Ok(DriftEstimate {
        lambda_hat: kappa.value,
        std_error: kappa.stderr,
        per_class,
        disagreements,
        max_relative_spread,
        horizon,
        trials: records.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// `P(K > λ)` for the Kolmogorov distribution.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    // below this point the series has not settled and the survival is 1 to double precision
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=KOLMOGOROV_TERMS {
        let k = k as f64;
        let term = (-2.0 * k * k * lambda * lambda).exp();
        sum += if k as usize % 2 == 1 { term } else { -term };
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// One-sample KS test against `Normal(0, variance)` with the asymptotic p-value.
pub fn ks_test(samples: &[f64], variance: f64) -> Result<KsResult> {
    if samples.is_empty() {
        return Err(Error::invalid("KS test needs samples"));
    }
    if !(variance > 0.0 && variance.is_finite()) {
        return Err(Error::invalid(format!("KS variance must be positive, got {variance}")));
    }
    let normal = Normal::new(0.0, variance.sqrt()).map_err(|e| Error::invalid(e.to_string()))?;
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let m = xs.len() as f64;
    let statistic = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = normal.cdf(x);
            (f - i as f64 / m).max((i + 1) as f64 / m - f)
        })
        .fold(0.0, f64::max);
    Ok(KsResult {
        statistic,
        p_value: kolmogorov_survival(m.sqrt() * statistic),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CltReport {
    pub step: usize,
    pub lambda_hat: f64,
    /// `(value − n λ̂) / √n`, one per trial in trial order.
    pub standardized_samples: Vec<f64>,
    pub variance_hat: f64,
    /// Absent when every sample is the same.
    pub ks: Option<KsResult>,
    pub degenerate: bool,
}

/// Standardizes end-of-horizon values and tests them against `Normal(0, V̂)`.
pub fn clt_report(records: &[PathRecord], obs: Observable, lambda_hat: f64) -> Result<CltReport> {
    let step = final_step(records)?;
    clt_report_at(records, obs, step, lambda_hat)
}

/// [`clt_report`] at an arbitrary checkpoint.
pub fn clt_report_at(records: &[PathRecord], obs: Observable, step: usize, lambda_hat: f64) -> Result<CltReport> {
    if records.len() < MIN_CLT_TRIALS {
        return Err(Error::invalid(format!(
            "CLT report needs at least {MIN_CLT_TRIALS} trials, got {}",
            records.len()
        )));
    }
    let n = step as f64;
    let standardized: Vec<f64> = values_at(records, obs, step)?
        .into_iter()
        .map(|v| (v - n * lambda_hat) / n.sqrt())
        .collect();
    let constant = standardized.windows(2).all(|w| w[0] == w[1]);
    let (_, variance_hat) = mean_var(&standardized);
    let ks = if constant {
        None
    } else if variance_hat > 0.0 {
        Some(ks_test(&standardized, variance_hat)?)
    } else {
        return Err(Error::Internal("zero variance from non-constant samples".into()));
    };
    Ok(CltReport {
        step,
        lambda_hat,
        standardized_samples: standardized,
        variance_hat,
        ks,
        degenerate: constant,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviationPoint {
    pub n: usize,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationCurve {
    pub epsilon: f64,
    pub points: Vec<DeviationPoint>,
    /// `r` in the fit `P(n) ≈ C rⁿ`; absent with fewer than two nonzero points.
    pub decay_rate_fit: Option<f64>,
    /// Whether `Σ_n P(n)` converges under the fit.
    pub summable: bool,
}

impl DeviationCurve {
    /// Non-increasing over grid points with `n ≥ from`.
    pub fn non_increasing_from(&self, from: usize) -> bool {
        let tail: Vec<f64> = self
            .points
            .iter()
            .filter(|p| p.n >= from)
            .map(|p| p.probability)
            .collect();
        tail.windows(2).all(|w| w[1] <= w[0])
    }

    pub fn final_probability(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.probability)
    }
}

/// `P(|value_n − nλ̂| ≥ εn)` along `n_grid`.
pub fn deviation_curve(
    records: &[PathRecord],
    obs: Observable,
    lambda_hat: f64,
    epsilon: f64,
    n_grid: &[usize],
) -> Result<DeviationCurve> {
    if records.is_empty() {
        return Err(Error::invalid("no sample paths"));
    }
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    let mut points = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let values = values_at(records, obs, n)
            .map_err(|_| Error::invalid(format!("deviation grid point {n} is not a checkpoint")))?;
        let nf = n as f64;
        let hits = values
            .iter()
            .filter(|&&v| (v - nf * lambda_hat).abs() >= epsilon * nf)
            .count();
        points.push(DeviationPoint {
            n,
            probability: hits as f64 / records.len() as f64,
        });
    }
    let decay_rate_fit = log_linear_rate(&points, records.len());
    let vanishes = points.last().is_some_and(|p| p.probability == 0.0);
    let summable = vanishes || decay_rate_fit.is_some_and(|r| r < 1.0);
    Ok(DeviationCurve {
        epsilon,
        points,
        decay_rate_fit,
        summable,
    })
}

/// Least squares of `ln p` on `n` over nonzero points, weighted by hit counts.
pub fn log_linear_rate(points: &[DeviationPoint], trials: usize) -> Option<f64> {
    let pts: Vec<(f64, f64, f64)> = points
        .iter()
        .filter(|p| p.probability > 0.0)
        .map(|p| (p.n as f64, p.probability.ln(), p.probability * trials as f64))
        .collect();
    if pts.len() < 2 || pts.windows(2).all(|w| w[0].0 == w[1].0) {
        return None;
    }
    let sw: f64 = pts.iter().map(|p| p.2).sum();
    let mx = pts.iter().map(|p| p.2 * p.0).sum::<f64>() / sw;
    let my = pts.iter().map(|p| p.2 * p.1).sum::<f64>() / sw;
    let sxy: f64 = pts.iter().map(|p| p.2 * (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| p.2 * (p.0 - mx).powi(2)).sum();
    Some((sxy / sxx).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub q10: f64,
    pub q50: f64,
    pub q90: f64,
}

impl Quantiles {
    fn of(xs: &[f64]) -> Quantiles {
        let mut v = xs.to_vec();
        v.sort_by(f64::total_cmp);
        Quantiles {
            q10: quantile_sorted(&v, 0.1),
            q50: quantile_sorted(&v, 0.5),
            q90: quantile_sorted(&v, 0.9),
        }
    }
}

/// Linear interpolation between order statistics.
pub fn quantile_sorted(v: &[f64], q: f64) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let pos = q * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub class: usize,
    pub horizon: usize,
    pub half_horizon: usize,
    /// Per trial `sup_{n ≤ H} |κ − σ|` over checkpoints.
    pub sup_gap: Vec<f64>,
    pub at_horizon: Quantiles,
    pub at_half: Quantiles,
    /// `|median(H) − median(H/2)| / median(H/2)`; 0 when both vanish.
    pub relative_change: f64,
}

/// Boundedness diagnostic for `|κ(Φ_n) − σ(Φ_n, g)|`.
pub fn kappa_sigma_gap(records: &[PathRecord], class: usize) -> Result<GapReport> {
    let horizon = final_step(records)?;
    let half = horizon / 2;
    let mut full = Vec::with_capacity(records.len());
    let mut halves = Vec::with_capacity(records.len());
    for r in records {
        let (mut sup_full, mut sup_half) = (0.0f64, 0.0f64);
        let mut seen_half = false;
        for cp in &r.checkpoints {
            let gap = (cp.kappa - Observable::Sigma(class).value(cp)?).abs();
            sup_full = sup_full.max(gap);
            if cp.step <= half {
                sup_half = sup_half.max(gap);
                seen_half = true;
            }
        }
        if !seen_half {
            return Err(Error::invalid(format!("no checkpoint at or below H/2 = {half}")));
        }
        full.push(sup_full);
        halves.push(sup_half);
    }
    let at_horizon = Quantiles::of(&full);
    let at_half = Quantiles::of(&halves);
    let relative_change = if at_half.q50 == 0.0 {
        if at_horizon.q50 == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (at_horizon.q50 - at_half.q50).abs() / at_half.q50
    };
    Ok(GapReport {
        class,
        horizon,
        half_horizon: half,
        sup_gap: full,
        at_horizon,
        at_half,
        relative_change,
    })
}
