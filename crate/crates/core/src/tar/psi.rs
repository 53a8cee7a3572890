use serde::Serialize;

use super::spec::TarSpec;
use super::stationarity::{regime_stationarity, spectral_radius};
use crate::error::{Error, Result};

pub const DEFAULT_PSI_TOL: f64 = 1e-12;

/// Hard cap on the expansion length, reached only for roots extremely close
/// to the unit circle.
const MAX_TERMS: usize = 10_000_000;

/// Coefficients of psi_j(z) = 1 / phi_j(z), truncated.
#[derive(Debug, Clone, Serialize)]
pub struct PsiWeights {
    pub weights: Vec<f64>,
    /// psi_j(1) = sum of the weights
    pub psi_sum: f64,
    /// sigma-bar_j^2 = sum of squared weights
    pub sigma_bar_sq: f64,
}

/// Expands psi_m = sum_{i=1..min(m,k)} a_i psi_{m-i} with psi_0 = 1.
///
/// Expansion stops at the first M for which the geometric tail bound
/// max(|psi_{M-k+1}|, ..., |psi_M|) * rho / (1 - rho) falls below `tol`,
/// rho being the largest reciprocal-root modulus.
pub fn psi_expansion(ar: &[f64], tol: f64) -> Vec<f64> {
    let k = ar.len();
    let mut psi = vec![1.0];
    if k == 0 || ar.iter().all(|&a| a == 0.0) {
        return psi;
    }
    let rho = spectral_radius(ar);
    let factor = rho / (1.0 - rho);
    loop {
        let m = psi.len();
        let next: f64 = (1..=m.min(k)).map(|i| ar[i - 1] * psi[m - i]).sum();
        psi.push(next);
        let window = &psi[psi.len().saturating_sub(k)..];
        let tail = window.iter().fold(0.0f64, |acc, v| acc.max(v.abs())) * factor;
        if psi.len() > k && tail < tol {
            break;
        }
        if psi.len() >= MAX_TERMS {
            break;
        }
    }
    psi
}

pub fn compute_psi_weights(spec: &TarSpec, regime: usize, tol: f64) -> Result<PsiWeights> {
    let r = spec.regime(regime);
    let rep = regime_stationarity(regime, r);
    if !rep.stationary {
        return Err(Error::NonStationaryRegime { regime, min_modulus: rep.min_modulus() });
    }
    let weights = psi_expansion(&r.ar, tol);
    let psi_sum = weights.iter().sum();
    let sigma_bar_sq = weights.iter().map(|w| w * w).sum();
    Ok(PsiWeights { weights, psi_sum, sigma_bar_sq })
}
