//! Structure identification (number of regimes, thresholds, orders) by NAIC.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ols::ols;
use crate::stats::quantile;
use crate::tar::spec::regime_index;
use crate::tar::{Regime, TarSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureCandidate {
    pub l: usize,
    pub thresholds: Vec<f64>,
    pub orders: Vec<usize>,
}

impl StructureCandidate {
    pub fn new(thresholds: Vec<f64>, orders: Vec<usize>) -> Result<Self> {
        if orders.len() != thresholds.len() + 1 {
            return Err(Error::InvalidSpec("need one more order than thresholds".into()));
        }
        if thresholds.windows(2).any(|w| !(w[0] < w[1])) || thresholds.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidSpec("thresholds must be finite and strictly increasing".into()));
        }
        Ok(StructureCandidate { l: orders.len(), thresholds, orders })
    }

    pub fn max_order(&self) -> usize {
        self.orders.iter().copied().max().unwrap_or(0)
    }
}

/// Threshold candidates: empirical quantiles of z or explicit values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "values", rename_all = "snake_case")]
pub enum ThresholdGrid {
    Quantiles(Vec<f64>),
    Values(Vec<f64>),
}

impl Default for ThresholdGrid {
    /// Quantiles 0.15, 0.20, ..., 0.85.
    fn default() -> Self {
        ThresholdGrid::Quantiles((3..=17).map(|i| i as f64 * 0.05).collect())
    }
}

impl ThresholdGrid {
    fn resolve(&self, z: &[f64]) -> Vec<f64> {
        let mut v: Vec<f64> = match self {
            ThresholdGrid::Quantiles(q) => q.iter().map(|&q| quantile(z, q)).collect(),
            ThresholdGrid::Values(v) => v.clone(),
        };
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CandidateScore {
    pub structure: StructureCandidate,
    pub naic: f64,
    /// Observations per regime in the common effective sample.
    pub counts: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentificationReport {
    pub best: CandidateScore,
    /// Best single-regime (linear AR) fit on the same sample.
    pub linear_baseline: Option<CandidateScore>,
    /// Every feasible multi-regime candidate, sorted by NAIC.
    pub candidates: Vec<CandidateScore>,
    pub effective_sample: usize,
}

/// Regime data in the common sample t = start..T-1.
struct Sample<'a> {
    x: &'a [f64],
    z: &'a [f64],
    start: usize,
    max_k: usize,
}

impl Sample<'_> {
    /// Per-regime term n ln(sigma^2) + 2(k + 1), minimized over feasible k.
    fn best_order(&self, ts: &[usize]) -> Option<(usize, f64)> {
        let n = ts.len();
        let mut best: Option<(usize, f64)> = None;
        for k in 0..=self.max_k {
            if n < 10 * (k + 1) {
                break;
            }
            let Some(s2) = residual_variance(self.x, ts, k) else { continue };
            let score = n as f64 * s2.ln() + 2.0 * (k + 1) as f64;
            if best.is_none_or(|(_, b)| score < b) {
                best = Some((k, score));
            }
        }
        best
    }

    fn score(&self, thresholds: &[f64]) -> Option<CandidateScore> {
        let l = thresholds.len() + 1;
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); l];
        for t in self.start..self.x.len() {
            groups[regime_index(thresholds, self.z[t])].push(t);
        }
        let mut orders = Vec::with_capacity(l);
        let mut total = 0.0;
        for g in &groups {
            let (k, s) = self.best_order(g)?;
            orders.push(k);
            total += s;
        }
        let n = self.x.len() - self.start;
        Some(CandidateScore {
            structure: StructureCandidate { l, thresholds: thresholds.to_vec(), orders },
            naic: total / n as f64,
            counts: groups.iter().map(Vec::len).collect(),
        })
    }
}

/// MLE residual variance SSR / n of an AR(k) with intercept fitted on the cases `ts`.
fn residual_variance(x: &[f64], ts: &[usize], k: usize) -> Option<f64> {
    let n = ts.len();
    if k == 0 {
        let m = ts.iter().map(|&t| x[t]).sum::<f64>() / n as f64;
        let s2 = ts.iter().map(|&t| (x[t] - m).powi(2)).sum::<f64>() / n as f64;
        return (s2 > 0.0).then_some(s2);
    }
    let design = DMatrix::from_fn(n, k + 1, |i, j| if j == 0 { 1.0 } else { x[ts[i] - j] });
    let y = DVector::from_fn(n, |i, _| x[ts[i]]);
    let fit = ols(&design, &y).ok()?;
    let s2 = fit.ssr / n as f64;
    (s2 > 0.0).then_some(s2)
}

fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    rec(0, n, r, &mut cur, &mut out);
    out
}

/// Searches l = 2..=max_l, thresholds drawn from `grid` and per-regime
/// orders 0..=max_k for the minimum of
/// NAIC = sum_j [n_j ln(sigma_j^2) + 2(k_j + 1)] / sum_j n_j.
///
/// All candidates are scored on the same sample t = max_k..T-1, the regime
/// at t being given by z_t. A regime order k is admissible only if the regime
/// holds at least 10(k + 1) observations.
pub fn identify_structure(
    x: &[f64],
    z: &[f64],
    max_l: usize,
    max_k: usize,
    grid: &ThresholdGrid,
) -> Result<IdentificationReport> {
    if x.len() != z.len() {
        return Err(Error::InvalidInput("x and z must have the same length".into()));
    }
    if x.len() <= max_k + 1 {
        return Err(Error::InsufficientData("series shorter than the largest order".into()));
    }
    let sample = Sample { x, z, start: max_k, max_k };
    let values = grid.resolve(&z[max_k..]);
    let sets: Vec<Vec<f64>> = (2..=max_l)
        .flat_map(|l| combinations(values.len(), l - 1))
        .map(|idx| idx.iter().map(|&i| values[i]).collect())
        .collect();
    let mut candidates: Vec<CandidateScore> = sets.par_iter().filter_map(|th| sample.score(th)).collect();
    candidates.sort_by(|a, b| a.naic.total_cmp(&b.naic));
    let best = candidates.first().cloned().ok_or(Error::NoFeasibleCandidate)?;
    Ok(IdentificationReport {
        best,
        linear_baseline: sample.score(&[]),
        candidates,
        effective_sample: x.len() - max_k,
    })
}

/// Least-squares fit of every regime for a given structure; h is the
/// residual standard deviation SSR / n_j.
pub fn fit_least_squares(x: &[f64], z: &[f64], structure: &StructureCandidate) -> Result<TarSpec> {
    let k = structure.max_order();
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); structure.l];
    for t in k..x.len() {
        groups[regime_index(&structure.thresholds, z[t])].push(t);
    }
    let mut regimes = Vec::with_capacity(structure.l);
    for (j, (g, &kj)) in groups.iter().zip(&structure.orders).enumerate() {
        if g.len() <= kj + 1 {
            return Err(Error::EmptyRegime(j));
        }
        let design = DMatrix::from_fn(g.len(), kj + 1, |i, c| if c == 0 { 1.0 } else { x[g[i] - c] });
        let y = DVector::from_fn(g.len(), |i, _| x[g[i]]);
        let fit = ols(&design, &y)?;
        let h = (fit.ssr / g.len() as f64).sqrt();
        regimes.push(Regime::new(fit.coef[0], fit.coef.iter().skip(1).copied().collect(), h));
    }
    TarSpec::new(structure.thresholds.clone(), regimes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tar::presets::m1;
    use crate::tar::simulate_tar;

    #[test]
    fn m1_structure_is_recovered() {
        let m = m1();
        let path = simulate_tar(&m.spec, m.z.as_ref().unwrap(), 2000, 300, 21).unwrap();
        let rep = identify_structure(&path.x, &path.z, 2, 3, &ThresholdGrid::default()).unwrap();
        assert_eq!(rep.best.structure.l, 2);
        assert_eq!(rep.best.structure.orders, vec![0, 1]);
        let lo = quantile(&path.z, 0.4);
        let hi = quantile(&path.z, 0.6);
        let r = rep.best.structure.thresholds[0];
        assert!(lo <= r && r <= hi, "threshold {r} outside ({lo}, {hi})");
        assert!(rep.linear_baseline.unwrap().naic > rep.best.naic);
    }

    #[test]
    fn empty_grid_has_no_candidate() {
        let m = m1();
        let path = simulate_tar(&m.spec, m.z.as_ref().unwrap(), 200, 50, 1).unwrap();
        let r = identify_structure(&path.x, &path.z, 2, 2, &ThresholdGrid::Values(vec![]));
        assert!(matches!(r, Err(Error::NoFeasibleCandidate)));
    }

    #[test]
    fn sample_floor_excludes_extreme_thresholds() {
        let m = m1();
        let path = simulate_tar(&m.spec, m.z.as_ref().unwrap(), 200, 50, 1).unwrap();
        let r = identify_structure(&path.x, &path.z, 2, 1, &ThresholdGrid::Values(vec![100.0]));
        assert!(matches!(r, Err(Error::NoFeasibleCandidate)));
    }

    #[test]
    fn least_squares_fit_is_close_on_long_sample() {
        let m = m1();
        let path = simulate_tar(&m.spec, m.z.as_ref().unwrap(), 20_000, 100, 2).unwrap();
        let s = StructureCandidate::new(vec![0.0], vec![0, 1]).unwrap();
        let fit = fit_least_squares(&path.x, &path.z, &s).unwrap();
        assert!((fit.regime(1).ar[0] - 0.4).abs() < 0.03);
        assert!((fit.regime(0).h - 0.7).abs() < 0.03);
    }

    #[test]
    fn combination_count() {
        assert_eq!(combinations(5, 2).len(), 10);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
    }
}
