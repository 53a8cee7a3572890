use serde::{Deserialize, Serialize};

use super::bvn::bvn_rect;
use super::spec::{regime_index, ZProcessSpec};
use crate::error::{Error, Result};
use crate::stats::norm_cdf;

/// Joint regime probabilities at one lag: `p[j][k] = P(Z_t in B_j, Z_{t-omega} in B_k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointProbs {
    pub omega: usize,
    pub p: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeProbs {
    pub marginal: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub joint: Vec<JointProbs>,
}

impl RegimeProbs {
    /// Probabilities supplied directly. They must be non-negative and sum to
    /// one within 1e-12.
    pub fn from_marginals(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() || p.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidInput("regime probabilities must be finite and >= 0".into()));
        }
        let s: f64 = p.iter().sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("regime probabilities sum to {s}, not 1")));
        }
        if let Some(j) = p.iter().position(|&v| v == 0.0) {
            return Err(Error::DegenerateRegime(j));
        }
        Ok(RegimeProbs { marginal: p, joint: Vec::new() })
    }

    /// Equal weights 1/l.
    pub fn uniform(l: usize) -> Self {
        RegimeProbs { marginal: vec![1.0 / l as f64; l], joint: Vec::new() }
    }

    pub fn l(&self) -> usize {
        self.marginal.len()
    }

    pub fn joint(&self, omega: usize) -> Option<&JointProbs> {
        self.joint.iter().find(|j| j.omega == omega)
    }
}

fn gaussian_edges(thresholds: &[f64], mean: f64, sd: f64) -> Vec<f64> {
    let mut e = Vec::with_capacity(thresholds.len() + 2);
    e.push(f64::NEG_INFINITY);
    e.extend(thresholds.iter().map(|r| (r - mean) / sd));
    e.push(f64::INFINITY);
    e
}

fn cdf_ext(x: f64) -> f64 {
    if x == f64::INFINITY {
        1.0
    } else if x == f64::NEG_INFINITY {
        0.0
    } else {
        norm_cdf(x)
    }
}

/// Marginal p_j and, for every requested lag, the joint p_{omega,jk}.
///
/// Gaussian AR(1): marginals from the stationary normal law, joints from a
/// bivariate normal with correlation phi^omega. Observed: empirical
/// frequencies, with lag pairs (t, t - omega mod T) taken circularly so the
/// joint table's margins equal the marginal frequencies exactly.
pub fn regime_probabilities(z: &ZProcessSpec, thresholds: &[f64], omegas: &[usize]) -> Result<RegimeProbs> {
    z.validate()?;
    let l = thresholds.len() + 1;
    let (marginal, joint) = match z {
        ZProcessSpec::GaussianAr1 { phi, mean, .. } => {
            let sd = z.stationary_sd().expect("gaussian");
            let e = gaussian_edges(thresholds, *mean, sd);
            let marginal: Vec<f64> = (0..l).map(|j| cdf_ext(e[j + 1]) - cdf_ext(e[j])).collect();
            let joint = omegas
                .iter()
                .map(|&omega| {
                    let p = if omega == 0 {
                        (0..l).map(|j| (0..l).map(|k| if j == k { marginal[j] } else { 0.0 }).collect()).collect()
                    } else {
                        let rho = phi.powi(omega as i32);
                        (0..l)
                            .map(|j| (0..l).map(|k| bvn_rect(e[j], e[j + 1], e[k], e[k + 1], rho)).collect())
                            .collect()
                    };
                    JointProbs { omega, p }
                })
                .collect();
            (marginal, joint)
        }
        ZProcessSpec::Observed { series } => {
            let n = series.len();
            let idx: Vec<usize> = series.iter().map(|&v| regime_index(thresholds, v)).collect();
            let mut marginal = vec![0.0; l];
            for &j in &idx {
                marginal[j] += 1.0;
            }
            marginal.iter_mut().for_each(|c| *c /= n as f64);
            let joint = omegas
                .iter()
                .map(|&omega| {
                    let mut p = vec![vec![0.0; l]; l];
                    for t in 0..n {
                        let s = (t + n - omega % n) % n;
                        p[idx[t]][idx[s]] += 1.0 / n as f64;
                    }
                    JointProbs { omega, p }
                })
                .collect();
            (marginal, joint)
        }
    };
    if let Some(j) = marginal.iter().position(|&p| p <= 0.0) {
        return Err(Error::DegenerateRegime(j));
    }
    Ok(RegimeProbs { marginal, joint })
}
