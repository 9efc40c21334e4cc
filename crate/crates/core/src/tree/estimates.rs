//! Monte Carlo estimators built on samples of the hitting measure.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freegroup::{Rank, ReducedWord};
use crate::stats::Estimate;
use crate::walk::{run_experiment, MeasureSpec, Walk, WalkConfig};

use super::boundary::{undecidable, BoundaryPoint};
use super::geometry::{busemann, gromov_product, GromovProduct, Point};

/// Limit points of `trials` independent sample paths, certified as deep as the
/// walk allows.
pub fn sample_hitting_measure(
    rank: Rank,
    measure: &MeasureSpec<ReducedWord>,
    config: &WalkConfig,
    threads: usize,
) -> Result<Vec<BoundaryPoint>> {
    let walk = Walk::Tree {
        rank,
        measure: measure.clone(),
        tracked: Vec::new(),
    };
    Ok(run_experiment(&walk, config, threads)?
        .into_iter()
        .filter_map(|r| r.boundary)
        .collect())
}

fn finite_product(x: &BoundaryPoint, y: &BoundaryPoint) -> Result<f64> {
    match gromov_product(&Point::Boundary(x.clone()), &Point::Boundary(y.clone()))? {
        GromovProduct::Finite(k) => Ok(k as f64),
        GromovProduct::Infinite => Err(Error::invalid(format!(
            "boundary sample {y} coincides with {x}"
        ))),
    }
}

/// `ψ(x) = −2 ∫ (x|y)_o dν*(y)` estimated from samples of `ν*`.
pub fn psi_estimate(x: &BoundaryPoint, samples: &[BoundaryPoint]) -> Result<Estimate> {
    if samples.is_empty() {
        return Err(Error::invalid("psi estimate needs at least one boundary sample"));
    }
    let values = samples
        .iter()
        .map(|y| Ok(-2.0 * finite_product(x, y)?))
        .collect::<Result<Vec<_>>>()?;
    Estimate::from_samples(&values)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenteringRow {
    pub x: BoundaryPoint,
    pub estimate: Estimate,
    /// Distance from the drift in combined standard errors.
    pub z_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenteringReport {
    pub rows: Vec<CenteringRow>,
    pub drift: Estimate,
    pub max_pairwise_discrepancy: f64,
    pub max_drift_discrepancy: f64,
}

impl CenteringReport {
    /// Every row within `z` combined standard errors of the drift.
    pub fn agrees_within(&self, z: f64) -> bool {
        self.rows.iter().all(|r| r.z_score <= z)
    }
}

/// `E_μ[β₀(·, x)]` with `β₀(g, x) = β(g, x) + ψ(g·x) − ψ(x)` for each `x`.
///
/// Both `ψ` terms are estimated from the same samples `y_i`, so each sample
/// contributes `Σ_s μ(s) (β(s, x) − 2(s·x|y_i)_o + 2(x|y_i)_o)` and the
/// standard error is taken over these paired values.
pub fn centering_check(
    measure: &MeasureSpec<ReducedWord>,
    x_points: &[BoundaryPoint],
    samples: &[BoundaryPoint],
    drift: Estimate,
) -> Result<CenteringReport> {
    if x_points.is_empty() || samples.is_empty() {
        return Err(Error::invalid("centering check needs boundary points and samples"));
    }
    let mut rows = Vec::with_capacity(x_points.len());
    for x in x_points {
        if x.is_truncated() {
            return Err(Error::invalid("centering points must be eventually periodic"));
        }
        let moved = measure
            .atoms()
            .iter()
            .map(|(s, w)| Ok((s.clone(), *w, busemann(s, x)? as f64, x.act(s)?)))
            .collect::<Result<Vec<_>>>()?;
        let drift_part: f64 = moved.iter().map(|(_, w, b, _)| w * b).sum();
        let values = samples
            .iter()
            .map(|y| {
                let base = finite_product(x, y)?;
                let mut v = drift_part;
                for (_, w, _, sx) in &moved {
                    v += w * 2.0 * (base - finite_product(sx, y)?);
                }
                Ok(v)
            })
            .collect::<Result<Vec<_>>>()?;
        let estimate = Estimate::from_samples(&values)?;
        rows.push(CenteringRow {
            x: x.clone(),
            estimate,
            z_score: estimate.z_distance(&drift),
        });
    }
    let mut pairwise = 0.0f64;
    for (i, a) in rows.iter().enumerate() {
        for b in &rows[i + 1..] {
            pairwise = pairwise.max((a.estimate.value - b.estimate.value).abs());
        }
    }
    let from_drift = rows
        .iter()
        .map(|r| (r.estimate.value - drift.value).abs())
        .fold(0.0, f64::max);
    Ok(CenteringReport {
        rows,
        drift,
        max_pairwise_discrepancy: pairwise,
        max_drift_discrepancy: from_drift,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailPoint {
    pub n: usize,
    pub threshold: usize,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailCurve {
    pub points: Vec<TailPoint>,
    /// Fitted `r` in `P ≈ C rⁿ`; `None` with fewer than two nonzero points.
    pub decay_rate: Option<f64>,
}

/// Whether `(x|y)_o ≥ k`, which only needs the first `k` letters of both.
fn product_at_least(x: &BoundaryPoint, y: &BoundaryPoint, k: usize) -> Result<bool> {
    for i in 0..k {
        match (x.letter(i), y.letter(i)) {
            (Some(a), Some(b)) if a == b => continue,
            (Some(_), Some(_)) => return Ok(false),
            _ => return Err(undecidable(i, "Gromov product tail")),
        }
    }
    Ok(true)
}

/// `ν*{y : (x|y)_o ≥ ⌈αn⌉}` along `n_grid`, with a geometric fit of the decay.
pub fn h2_tail_estimate(
    x: &BoundaryPoint,
    alpha: f64,
    n_grid: &[usize],
    samples: &[BoundaryPoint],
) -> Result<TailCurve> {
    if samples.is_empty() {
        return Err(Error::invalid("tail estimate needs at least one boundary sample"));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::invalid(format!("alpha must be positive, got {alpha}")));
    }
    let mut points = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let t = (alpha * n as f64).ceil();
        let threshold = if t > usize::MAX as f64 { usize::MAX } else { t as usize };
        let mut hits = 0usize;
        for y in samples {
            if product_at_least(x, y, threshold)? {
                hits += 1;
            }
        }
        points.push(TailPoint {
            n,
            threshold,
            probability: hits as f64 / samples.len() as f64,
        });
    }
    let decay_rate = fit_geometric(&points, samples.len());
    Ok(TailCurve { points, decay_rate })
}

/// Weighted least squares of `ln p` against `n`, weighting each point by its
/// hit count (the inverse variance of `ln p` to first order).
fn fit_geometric(points: &[TailPoint], samples: usize) -> Option<f64> {
    let pts: Vec<(f64, f64, f64)> = points
        .iter()
        .filter(|p| p.probability > 0.0)
        .map(|p| (p.n as f64, p.probability.ln(), p.probability * samples as f64))
        .collect();
    let distinct = pts.windows(2).any(|w| w[0].0 != w[1].0);
    if pts.len() < 2 || !distinct {
        return None;
    }
    let sw: f64 = pts.iter().map(|p| p.2).sum();
    let mx = pts.iter().map(|p| p.2 * p.0).sum::<f64>() / sw;
    let my = pts.iter().map(|p| p.2 * p.1).sum::<f64>() / sw;
    let sxy: f64 = pts.iter().map(|p| p.2 * (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| p.2 * (p.0 - mx).powi(2)).sum();
    Some((sxy / sxx).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bp(s: &str) -> BoundaryPoint {
        s.parse().unwrap()
    }

    fn r2() -> Rank {
        Rank::new(2).unwrap()
    }

    fn srw() -> MeasureSpec<ReducedWord> {
        MeasureSpec::uniform(["a", "A", "b", "B"].iter().map(|s| s.parse().unwrap()).collect()).unwrap()
    }

    #[test]
    fn psi_arithmetic() {
        let x = bp("per:a");
        let e = psi_estimate(&x, &[bp("pre:ab per:b"), bp("pre:aaab per:b")]).unwrap();
        assert_eq!(e.value, -4.0);
        let zero = psi_estimate(&x, &[bp("per:b"), bp("per:B"), bp("per:A")]).unwrap();
        assert_eq!(zero, Estimate { value: 0.0, stderr: 0.0 });
        assert!(psi_estimate(&x, &[]).is_err());
        assert!(psi_estimate(&x, &[bp("per:a")]).is_err());
        assert!(matches!(
            psi_estimate(&x, &[bp("prefix:aaa depth:2")]),
            Err(Error::Undecidable { .. })
        ));
    }

    #[test]
    fn psi_estimates_are_consistent() {
        let x = bp("per:a");
        let cfg = |seed| WalkConfig::new(200, 5_000, seed, vec![200]).unwrap();
        let first = sample_hitting_measure(r2(), &srw(), &cfg(1), 0).unwrap();
        let second = sample_hitting_measure(r2(), &srw(), &cfg(2), 0).unwrap();
        let a = psi_estimate(&x, &first).unwrap();
        let b = psi_estimate(&x, &second).unwrap();
        assert!(a.z_distance(&b) < 3.0, "{a:?} {b:?}");
        // E(x|y) = Σ_k P(cp ≥ k) = (1/4) / (1 − 1/3) = 3/8 for SRW on F_2
        assert!(a.z_distance(&Estimate { value: -0.75, stderr: 0.0 }) < 4.0, "{a:?}");
    }

    #[test]
    fn identity_measure_is_flat() {
        let measure = MeasureSpec::point_mass(ReducedWord::empty());
        let samples = [bp("per:ab"), bp("pre:b per:a")];
        let drift = Estimate { value: 0.0, stderr: 0.0 };
        let report = centering_check(&measure, &[bp("per:a"), bp("per:B")], &samples, drift).unwrap();
        assert!(report.rows.iter().all(|r| r.estimate.value == 0.0));
        assert!(report.agrees_within(3.0));
    }

    #[test]
    fn srw_is_centered_at_its_drift() {
        let cfg = WalkConfig::new(200, 4_000, 3, vec![200]).unwrap();
        let samples = sample_hitting_measure(r2(), &srw(), &cfg, 0).unwrap();
        let xs: Vec<_> = ["per:a", "per:b", "per:AB", "pre:ab per:b", "per:aab"]
            .iter()
            .map(|s| bp(s))
            .collect();
        let drift = Estimate { value: 0.5, stderr: 0.0 };
        let report = centering_check(&srw(), &xs, &samples, drift).unwrap();
        assert!(report.agrees_within(3.0), "{report:?}");
        assert!(report.max_pairwise_discrepancy < 0.1, "{report:?}");
    }

    #[test]
    fn tail_curve() {
        let cfg = WalkConfig::new(80, 4_000, 9, vec![80]).unwrap();
        let samples = sample_hitting_measure(r2(), &srw(), &cfg, 0).unwrap();
        let x = bp("per:a");
        let grid: Vec<usize> = (1..=8).collect();
        let curve = h2_tail_estimate(&x, 1.0, &grid, &samples).unwrap();
        assert!(curve.points.windows(2).all(|w| w[1].probability <= w[0].probability));
        // first step: y starts with a with probability 1/4
        let direct = samples.iter().filter(|y| y.letter(0) == x.letter(0)).count() as f64 / samples.len() as f64;
        assert_eq!(curve.points[0].probability, direct);
        assert!((direct - 0.25).abs() < 0.03);
        let rate = curve.decay_rate.unwrap();
        assert!((rate - 1.0 / 3.0).abs() < 0.05, "{rate}");
        let empty = h2_tail_estimate(&x, 1e6, &grid, &samples).unwrap();
        assert!(empty.points.iter().all(|p| p.probability == 0.0));
        assert_eq!(empty.decay_rate, None);
    }

    #[test]
    fn geometric_fit_recovers_rate() {
        let points: Vec<TailPoint> = (1..=10)
            .map(|n| TailPoint {
                n,
                threshold: n,
                probability: 0.7 * 0.5f64.powi(n as i32),
            })
            .collect();
        let r = fit_geometric(&points, 1_000_000).unwrap();
        assert!((r - 0.5).abs() < 1e-9);
    }
}
