use nalgebra::{Complex, DMatrix};
use serde::Serialize;

use super::spec::{Regime, TarSpec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct RegimeStationarity {
    pub regime: usize,
    /// Roots of phi_j(z) = 1 - sum a_i z^i as (re, im) pairs.
    pub roots: Vec<(f64, f64)>,
    pub moduli: Vec<f64>,
    pub stationary: bool,
}

impl RegimeStationarity {
    pub fn min_modulus(&self) -> f64 {
        self.moduli.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

/// AR coefficients with trailing zeros dropped, so the polynomial degree is exact.
fn effective_ar(ar: &[f64]) -> &[f64] {
    let k = ar.iter().rposition(|&a| a != 0.0).map_or(0, |i| i + 1);
    &ar[..k]
}

/// Eigenvalues of the companion matrix of the AR recursion. They are the
/// reciprocals of the roots of phi(z).
pub(crate) fn companion_eigenvalues(ar: &[f64]) -> Vec<Complex<f64>> {
    let ar = effective_ar(ar);
    let k = ar.len();
    if k == 0 {
        return Vec::new();
    }
    let mut m = DMatrix::<f64>::zeros(k, k);
    for (i, &a) in ar.iter().enumerate() {
        m[(0, i)] = a;
    }
    for i in 1..k {
        m[(i, i - 1)] = 1.0;
    }
    m.complex_eigenvalues().iter().cloned().collect()
}

/// Largest modulus of the reciprocal roots (spectral radius of the companion matrix).
pub(crate) fn spectral_radius(ar: &[f64]) -> f64 {
    companion_eigenvalues(ar).iter().map(|c| c.norm()).fold(0.0, f64::max)
}

pub fn regime_stationarity(index: usize, regime: &Regime) -> RegimeStationarity {
    let eig = companion_eigenvalues(&regime.ar);
    let roots: Vec<Complex<f64>> = eig.iter().map(|l| Complex::new(1.0, 0.0) / l).collect();
    let moduli: Vec<f64> = roots.iter().map(|r| r.norm()).collect();
    let stationary = moduli.iter().all(|&m| m > 1.0);
    RegimeStationarity {
        regime: index,
        roots: roots.iter().map(|r| (r.re, r.im)).collect(),
        moduli,
        stationary,
    }
}

/// Root report for every regime. Regimes with no AR terms are trivially stationary.
pub fn check_stationarity(spec: &TarSpec) -> Vec<RegimeStationarity> {
    spec.regimes().iter().enumerate().map(|(j, r)| regime_stationarity(j, r)).collect()
}

impl TarSpec {
    pub fn ensure_stationary(&self) -> Result<()> {
        for rep in check_stationarity(self) {
            if !rep.stationary {
                return Err(Error::NonStationaryRegime { regime: rep.regime, min_modulus: rep.min_modulus() });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn quadratic_roots_match_closed_form() {
        // 1 - 0.3 z + 0.4 z^2: roots (0.3 +/- sqrt(0.09 - 1.6)) / 0.8
        let rep = regime_stationarity(0, &Regime::new(0.0, vec![0.3, -0.4], 1.0));
        assert!(rep.stationary);
        let disc = (1.6f64 - 0.09).sqrt();
        let expected = ((0.3f64 / 0.8).powi(2) + (disc / 0.8).powi(2)).sqrt();
        for m in &rep.moduli {
            assert_abs_diff_eq!(*m, expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn unit_root_and_white_noise() {
        assert!(!regime_stationarity(0, &Regime::new(0.0, vec![1.0], 1.0)).stationary);
        let wn = regime_stationarity(0, &Regime::new(0.0, vec![], 1.0));
        assert!(wn.stationary && wn.roots.is_empty());
    }

    #[test]
    fn trailing_zero_coefficients_do_not_add_roots() {
        let rep = regime_stationarity(0, &Regime::new(0.0, vec![0.5, 0.0, 0.0], 1.0));
        assert_eq!(rep.roots.len(), 1);
        assert_abs_diff_eq!(rep.roots[0].0, 2.0, epsilon = 1e-12);
    }
}
