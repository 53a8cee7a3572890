//! Regression tests for sign asymmetry in squared standardized residuals.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ols::{f_test, ols};

pub const MIN_LENGTH: usize = 50;
pub const DEFAULT_ENDERS_LAGS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FTestResult {
    pub statistic: f64,
    pub df1: usize,
    pub df2: usize,
    pub p_value: f64,
}

impl FTestResult {
    pub fn rejects(&self, level: f64) -> bool {
        self.p_value < level
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymmetryReport {
    /// Joint sign and size bias test.
    pub sign_bias: FTestResult,
    /// eta_t^2 on eta_{t-1}, ..., eta_{t-k}.
    pub leverage: FTestResult,
}

fn slopes_f(x: DMatrix<f64>, y: DVector<f64>, what: &str) -> Result<FTestResult> {
    let n = y.len();
    let q = x.ncols() - 1;
    let full = ols(&x, &y).map_err(|_| Error::DegenerateResiduals(format!("{what} regressors are collinear")))?;
    let m = y.mean();
    let ssr_r = y.iter().map(|v| (v - m).powi(2)).sum::<f64>();
    let df2 = n - q - 1;
    let (statistic, p_value) = f_test(ssr_r, full.ssr, q, df2);
    Ok(FTestResult { statistic, df1: q, df2, p_value })
}

/// eta_t^2 = b0 + b1 S-_{t-1} + b2 S-_{t-1} eta_{t-1} + b3 S+_{t-1} eta_{t-1},
/// H0: b1 = b2 = b3 = 0, with S- the indicator of a negative shock.
pub fn sign_bias_test(eta: &[f64]) -> Result<FTestResult> {
    check(eta)?;
    let n = eta.len() - 1;
    let neg = |t: usize| if eta[t] < 0.0 { 1.0 } else { 0.0 };
    if (0..n).all(|t| neg(t) == 0.0) || (0..n).all(|t| neg(t) == 1.0) {
        return Err(Error::DegenerateResiduals("residuals do not change sign".into()));
    }
    let x = DMatrix::from_fn(n, 4, |t, c| match c {
        0 => 1.0,
        1 => neg(t),
        2 => neg(t) * eta[t],
        _ => (1.0 - neg(t)) * eta[t],
    });
    let y = DVector::from_fn(n, |t, _| eta[t + 1] * eta[t + 1]);
    slopes_f(x, y, "sign bias")
}

/// eta_t^2 = d0 + d1 eta_{t-1} + ... + dk eta_{t-k}, H0: all slopes zero.
pub fn leverage_test(eta: &[f64], lags: usize) -> Result<FTestResult> {
    check(eta)?;
    if lags == 0 || eta.len() <= 2 * lags + 2 {
        return Err(Error::InsufficientData(format!("{} residuals for {lags} lags", eta.len())));
    }
    let n = eta.len() - lags;
    let x = DMatrix::from_fn(n, lags + 1, |t, c| if c == 0 { 1.0 } else { eta[t + lags - c] });
    let y = DVector::from_fn(n, |t, _| eta[t + lags] * eta[t + lags]);
    slopes_f(x, y, "leverage")
}

fn check(eta: &[f64]) -> Result<()> {
    if eta.len() < MIN_LENGTH {
        return Err(Error::InsufficientData(format!("{} residuals, at least {MIN_LENGTH} required", eta.len())));
    }
    if eta.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("residuals must be finite".into()));
    }
    let m = eta.iter().sum::<f64>() / eta.len() as f64;
    if eta.iter().all(|v| (v - m).abs() < 1e-300) {
        return Err(Error::DegenerateResiduals("residuals are constant".into()));
    }
    Ok(())
}

pub fn asymmetry_tests(eta: &[f64], lags: usize) -> Result<AsymmetryReport> {
    Ok(AsymmetryReport { sign_bias: sign_bias_test(eta)?, leverage: leverage_test(eta, lags)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn noise(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    #[test]
    fn all_positive_residuals_are_degenerate() {
        let eta: Vec<f64> = (0..100).map(|i| 1.0 + (i as f64 * 0.37).sin().abs()).collect();
        assert!(matches!(sign_bias_test(&eta), Err(Error::DegenerateResiduals(_))));
    }

    #[test]
    fn short_series_is_rejected() {
        assert!(matches!(asymmetry_tests(&noise(30, 1), 5), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn degrees_of_freedom() {
        let r = asymmetry_tests(&noise(500, 2), 5).unwrap();
        assert_eq!((r.sign_bias.df1, r.sign_bias.df2), (3, 495));
        assert_eq!((r.leverage.df1, r.leverage.df2), (5, 489));
        assert!(r.sign_bias.p_value > 0.0 && r.sign_bias.p_value <= 1.0);
    }

    #[test]
    fn detects_negative_shock_feedback() {
        // variance doubles after negative shocks
        let z = noise(2000, 3);
        let mut eta = vec![z[0]];
        for t in 1..z.len() {
            let s = if eta[t - 1] < 0.0 { 1.6 } else { 0.6 };
            eta.push(s * z[t]);
        }
        let r = asymmetry_tests(&eta, 5).unwrap();
        assert!(r.sign_bias.rejects(0.01) && r.leverage.rejects(0.01));
    }
}
