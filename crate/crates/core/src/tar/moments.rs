use serde::{Deserialize, Serialize};

use super::probs::{regime_probabilities, RegimeProbs};
use super::psi::{compute_psi_weights, PsiWeights, DEFAULT_PSI_TOL};
use super::spec::{TarSpec, ZProcessSpec};
use crate::error::{Error, Result};

/// Moments of X_t given Z_t in B_j.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeMoments {
    /// mu_{j,1} = a_0 / phi_j(1)
    pub mu1: f64,
    /// mu_{j,2} = sigma_j^2 + mu_{j,1}^2
    pub mu2: f64,
    /// sigma_j^2 = (h sigma-bar_j)^2
    pub sigma2: f64,
    pub psi_sum: f64,
    pub sigma_bar_sq: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentSummary {
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub kurtosis: f64,
    pub per_regime: Vec<RegimeMoments>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanVar {
    pub mean: f64,
    pub variance: f64,
}

/// Conditional moments by information set: regime only (type I), regime and
/// past data (type II), past data only (type III).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionalMoments {
    pub type1: Vec<MeanVar>,
    pub type2: Option<Vec<MeanVar>>,
    pub type3: Option<MeanVar>,
}

fn check_probs(spec: &TarSpec, probs: &RegimeProbs) -> Result<()> {
    if probs.l() != spec.l() {
        return Err(Error::InvalidInput(format!(
            "{} regime probabilities for {} regimes",
            probs.l(),
            spec.l()
        )));
    }
    Ok(())
}

pub fn psi_all(spec: &TarSpec, tol: f64) -> Result<Vec<PsiWeights>> {
    (0..spec.l()).map(|j| compute_psi_weights(spec, j, tol)).collect()
}

pub fn regime_moments(spec: &TarSpec, tol: f64) -> Result<Vec<RegimeMoments>> {
    let psi = psi_all(spec, tol)?;
    Ok(spec
        .regimes()
        .iter()
        .zip(&psi)
        .map(|(r, w)| {
            let mu1 = r.intercept / r.phi_at_one();
            let sigma2 = r.h * r.h * w.sigma_bar_sq;
            RegimeMoments { mu1, mu2: sigma2 + mu1 * mu1, sigma2, psi_sum: w.psi_sum, sigma_bar_sq: w.sigma_bar_sq }
        })
        .collect())
}

/// Mixture moments from per-regime normal laws N(mu_{j,1}, sigma_j^2) with weights p_j.
pub fn mixture_summary(p: &[f64], per_regime: Vec<RegimeMoments>) -> Result<MomentSummary> {
    let mean: f64 = p.iter().zip(&per_regime).map(|(p, m)| p * m.mu1).sum();
    let second: f64 = p.iter().zip(&per_regime).map(|(p, m)| p * m.mu2).sum();
    let variance = second - mean * mean;
    // The centred form avoids cancellation and is used for the higher moments.
    let centred: f64 = p
        .iter()
        .zip(&per_regime)
        .map(|(p, m)| p * (m.sigma2 + (m.mu1 - mean).powi(2)))
        .sum();
    if !(variance > 0.0) || !(centred > 0.0) {
        return Err(Error::DegenerateVariance(variance));
    }
    let m3: f64 = p
        .iter()
        .zip(&per_regime)
        .map(|(p, m)| {
            let d = m.mu1 - mean;
            p * d * (3.0 * m.sigma2 + d * d)
        })
        .sum();
    let m4: f64 = p
        .iter()
        .zip(&per_regime)
        .map(|(p, m)| {
            let d2 = (m.mu1 - mean).powi(2);
            p * (d2 * d2 + 6.0 * m.sigma2 * d2 + 3.0 * m.sigma2 * m.sigma2)
        })
        .sum();
    Ok(MomentSummary {
        mean,
        variance,
        skewness: m3 / centred.powf(1.5),
        kurtosis: m4 / (centred * centred),
        per_regime,
    })
}

/// Mean, variance, skewness and kurtosis of the stationary marginal of X_t.
pub fn unconditional_moments(spec: &TarSpec, probs: &RegimeProbs) -> Result<MomentSummary> {
    check_probs(spec, probs)?;
    let per_regime = regime_moments(spec, DEFAULT_PSI_TOL)?;
    mixture_summary(&probs.marginal, per_regime)
}

/// Type III mean and variance given the lags (most recent first).
pub fn type3(spec: &TarSpec, p: &[f64], lags: &[f64]) -> Result<MeanVar> {
    let k = spec.max_order();
    if lags.len() < k {
        return Err(Error::InsufficientHistory { needed: k, got: lags.len() });
    }
    let mut mean = 0.0;
    let mut second = 0.0;
    let mut noise = 0.0;
    for (r, &pj) in spec.regimes().iter().zip(p) {
        let m = r.predict(lags);
        mean += pj * m;
        second += pj * m * m;
        noise += pj * r.h * r.h;
    }
    Ok(MeanVar { mean, variance: noise + second - mean * mean })
}

pub fn conditional_moments(spec: &TarSpec, probs: &RegimeProbs, lags: Option<&[f64]>) -> Result<ConditionalMoments> {
    check_probs(spec, probs)?;
    let per = regime_moments(spec, DEFAULT_PSI_TOL)?;
    let type1 = per
        .iter()
        .zip(spec.regimes())
        .map(|(m, r)| MeanVar { mean: m.psi_sum * r.intercept, variance: m.sigma2 })
        .collect();
    let (type2, type3) = match lags {
        None => (None, None),
        Some(lags) => {
            let t3 = type3(spec, &probs.marginal, lags)?;
            let t2 = spec
                .regimes()
                .iter()
                .map(|r| MeanVar { mean: r.predict(lags), variance: r.h * r.h })
                .collect();
            (Some(t2), Some(t3))
        }
    };
    Ok(ConditionalMoments { type1, type2, type3 })
}

/// gamma(omega) for omega = 0..=omega_max using the joint regime
/// probabilities of `z`.
pub fn autocovariance(spec: &TarSpec, z: &ZProcessSpec, omega_max: usize) -> Result<Vec<f64>> {
    let omegas: Vec<usize> = (0..=omega_max).collect();
    let probs = regime_probabilities(z, spec.thresholds(), &omegas)?;
    autocovariance_with_probs(spec, &probs, omega_max)
}

/// gamma(omega) = sum_{j,k} p_{omega,jk} q_{jk}(omega) - mu^2 with
/// q_{jk}(omega) = mu_j mu_k + h_j h_k sum_m psi^(k)_m psi^(j)_{m+omega}.
/// Requires joint probabilities for every lag up to `omega_max`.
pub fn autocovariance_with_probs(spec: &TarSpec, probs: &RegimeProbs, omega_max: usize) -> Result<Vec<f64>> {
    check_probs(spec, probs)?;
    let psi = psi_all(spec, DEFAULT_PSI_TOL)?;
    let per = regime_moments(spec, DEFAULT_PSI_TOL)?;
    let mu: f64 = probs.marginal.iter().zip(&per).map(|(p, m)| p * m.mu1).sum();
    let l = spec.l();
    let mut out = Vec::with_capacity(omega_max + 1);
    for omega in 0..=omega_max {
        let joint = probs
            .joint(omega)
            .ok_or_else(|| Error::InvalidInput(format!("no joint regime probabilities for lag {omega}")))?;
        let mut g = 0.0;
        for j in 0..l {
            for k in 0..l {
                let pjk = joint.p[j][k];
                if pjk == 0.0 {
                    continue;
                }
                let (wj, wk) = (&psi[j].weights, &psi[k].weights);
                let cross: f64 = wk.iter().zip(wj.iter().skip(omega)).map(|(a, b)| a * b).sum();
                let hj = spec.regime(j).h;
                let hk = spec.regime(k).h;
                g += pjk * (per[j].mu1 * per[k].mu1 + hj * hk * cross);
            }
        }
        out.push(g - mu * mu);
    }
    Ok(out)
}
