//! Residual diagnostics: ACF/PACF, Ljung-Box, CUSUM, CUSUMSQ, ARCH-LM and
//! Jarque-Bera.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::likelihood::pseudo_residuals;
use crate::error::{Error, Result};
use crate::ols::ols;
use crate::stats::{kurtosis, mean, skewness, std_dev};
use crate::tar::TarSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestResult {
    pub statistic: f64,
    pub df: f64,
    pub p_value: f64,
}

fn chi2_sf(x: f64, df: f64) -> f64 {
    ChiSquared::new(df).expect("df > 0").sf(x.max(0.0))
}

/// Sample autocorrelations for lags 0..=max_lag (lag 0 is exactly 1).
pub fn acf(x: &[f64], max_lag: usize) -> Vec<f64> {
    let m = mean(x);
    let denom: f64 = x.iter().map(|v| (v - m) * (v - m)).sum();
    (0..=max_lag)
        .map(|k| {
            if k == 0 {
                return 1.0;
            }
            let num: f64 = (k..x.len()).map(|t| (x[t] - m) * (x[t - k] - m)).sum();
            num / denom
        })
        .collect()
}

/// Partial autocorrelations for lags 1..=max_lag by Durbin-Levinson.
pub fn pacf(x: &[f64], max_lag: usize) -> Vec<f64> {
    let r = acf(x, max_lag);
    let mut out = Vec::with_capacity(max_lag);
    let mut phi: Vec<f64> = Vec::new();
    let mut v = 1.0;
    for k in 1..=max_lag {
        let num = r[k] - phi.iter().enumerate().map(|(j, p)| p * r[k - 1 - j]).sum::<f64>();
        let kk = num / v;
        let mut next = vec![0.0; k];
        for j in 0..k - 1 {
            next[j] = phi[j] - kk * phi[k - 2 - j];
        }
        next[k - 1] = kk;
        phi = next;
        v *= 1.0 - kk * kk;
        out.push(kk);
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct AcfPacf {
    /// 0..=max_lag
    pub lags: Vec<usize>,
    pub acf: Vec<f64>,
    /// Entry 0 is lag 1.
    pub pacf: Vec<f64>,
    /// 1.96 / sqrt(T)
    pub band: f64,
}

impl AcfPacf {
    /// Share of lags >= 1 whose ACF lies inside the band.
    pub fn acf_inside_rate(&self) -> f64 {
        let inside = self.acf[1..].iter().filter(|v| v.abs() < self.band).count();
        inside as f64 / (self.acf.len() - 1) as f64
    }
}

pub fn acf_pacf(x: &[f64], max_lag: usize) -> Result<AcfPacf> {
    if max_lag == 0 || max_lag * 4 >= x.len() {
        return Err(Error::InvalidInput(format!("max_lag {max_lag} must be in 1..{}", x.len() / 4)));
    }
    Ok(AcfPacf {
        lags: (0..=max_lag).collect(),
        acf: acf(x, max_lag),
        pacf: pacf(x, max_lag),
        band: 1.96 / (x.len() as f64).sqrt(),
    })
}

/// Ljung-Box Q over lags 1..=lags, chi-square with `lags - fitted` df.
pub fn ljung_box(x: &[f64], lags: usize, fitted: usize) -> Result<TestResult> {
    if lags <= fitted || lags >= x.len() {
        return Err(Error::InvalidInput("Ljung-Box lag count out of range".into()));
    }
    let n = x.len() as f64;
    let r = acf(x, lags);
    let q = n * (n + 2.0) * (1..=lags).map(|k| r[k] * r[k] / (n - k as f64)).sum::<f64>();
    let df = (lags - fitted) as f64;
    Ok(TestResult { statistic: q, df, p_value: chi2_sf(q, df) })
}

/// Engle's ARCH-LM: T R^2 from regressing e_t^2 on `lags` of its own lags.
pub fn arch_lm(x: &[f64], lags: usize) -> Result<TestResult> {
    let n = x.len();
    if n <= 2 * lags + 2 {
        return Err(Error::InsufficientData("series too short for ARCH-LM".into()));
    }
    let sq: Vec<f64> = x.iter().map(|v| v * v).collect();
    let m = n - lags;
    let y = DVector::from_fn(m, |i, _| sq[i + lags]);
    let design = DMatrix::from_fn(m, lags + 1, |i, j| if j == 0 { 1.0 } else { sq[i + lags - j] });
    let fit = ols(&design, &y)?;
    let ybar = y.mean();
    let tss: f64 = y.iter().map(|v| (v - ybar).powi(2)).sum();
    if !(tss > 0.0) {
        return Err(Error::DegenerateResiduals("squared residuals are constant".into()));
    }
    let stat = m as f64 * (1.0 - fit.ssr / tss);
    Ok(TestResult { statistic: stat, df: lags as f64, p_value: chi2_sf(stat, lags as f64) })
}

/// Jarque-Bera normality test.
pub fn jarque_bera(x: &[f64]) -> Result<TestResult> {
    if x.len() < 8 {
        return Err(Error::InsufficientData("Jarque-Bera needs at least 8 points".into()));
    }
    if !(std_dev(x) > 0.0) {
        return Err(Error::DegenerateResiduals("zero variance".into()));
    }
    let n = x.len() as f64;
    let s = skewness(x);
    let k = kurtosis(x);
    let stat = n / 6.0 * (s * s + (k - 3.0).powi(2) / 4.0);
    Ok(TestResult { statistic: stat, df: 2.0, p_value: chi2_sf(stat, 2.0) })
}

/// Brown-Durbin-Evans CUSUM band coefficient a.
fn cusum_a(level: f64) -> Result<f64> {
    match level {
        l if (l - 0.01).abs() < 1e-12 => Ok(1.143),
        l if (l - 0.05).abs() < 1e-12 => Ok(0.948),
        l if (l - 0.10).abs() < 1e-12 => Ok(0.850),
        _ => Err(Error::InvalidInput(format!("unsupported significance level {level}; use 0.01, 0.05 or 0.10"))),
    }
}

/// Kolmogorov-Smirnov critical values for the sup of a Brownian bridge.
fn ks_critical(level: f64) -> Result<f64> {
    match level {
        l if (l - 0.01).abs() < 1e-12 => Ok(1.628),
        l if (l - 0.05).abs() < 1e-12 => Ok(1.358),
        l if (l - 0.10).abs() < 1e-12 => Ok(1.224),
        _ => Err(Error::InvalidInput(format!("unsupported significance level {level}; use 0.01, 0.05 or 0.10"))),
    }
}

/// CUSUMSQ band half-width c0.
///
/// Under the null S_t - t/T behaves like sqrt(2/T) times a Brownian bridge
/// (e^2 has variance 2), so c0 = c_KS / sqrt(n) with n = T/2. Stephens'
/// finite-sample correction sqrt(n) + 0.12 + 0.11/sqrt(n) is applied, which
/// tracks Durbin's (1969) exact table closely for n >= 10 (Stephens 1970,
/// "Use of the Kolmogorov-Smirnov, Cramer-von Mises and related statistics
/// without extensive tables").
pub fn cusumsq_c0(t_len: usize, level: f64) -> Result<f64> {
    let n = t_len as f64 / 2.0;
    let sn = n.sqrt();
    Ok(ks_critical(level)? / (sn + 0.12 + 0.11 / sn))
}

#[derive(Debug, Clone, Serialize)]
pub struct CusumReport {
    pub level: f64,
    /// 1..=T
    pub t: Vec<usize>,
    pub cusum: Vec<f64>,
    /// Symmetric band: |cusum_t| <= cusum_band_t.
    pub cusum_band: Vec<f64>,
    pub cusumsq: Vec<f64>,
    pub cusumsq_lower: Vec<f64>,
    pub cusumsq_upper: Vec<f64>,
    pub cusum_inside: bool,
    pub cusumsq_inside: bool,
}

/// CUSUM W_t = sum_{s<=t} e_s / sd(e) with bands +/- a (sqrt(T) + 2t/sqrt(T)),
/// and CUSUMSQ S_t = sum_{s<=t} e_s^2 / sum e^2 with bands t/T +/- c0.
pub fn cusum_tests(residuals: &[f64], level: f64) -> Result<CusumReport> {
    let a = cusum_a(level)?;
    let n = residuals.len();
    if n < 20 {
        return Err(Error::InsufficientData(format!("CUSUM needs at least 20 residuals, got {n}")));
    }
    let sd = std_dev(residuals);
    if !(sd > 0.0) {
        return Err(Error::DegenerateResiduals("residuals are constant".into()));
    }
    let c0 = cusumsq_c0(n, level)?;
    let tf = n as f64;
    let total_sq: f64 = residuals.iter().map(|e| e * e).sum();
    let mut cusum = Vec::with_capacity(n);
    let mut cusum_band = Vec::with_capacity(n);
    let mut cusumsq = Vec::with_capacity(n);
    let mut lower = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    let (mut s1, mut s2) = (0.0, 0.0);
    for (i, e) in residuals.iter().enumerate() {
        let t = (i + 1) as f64;
        s1 += e / sd;
        s2 += e * e;
        cusum.push(s1);
        cusum_band.push(a * (tf.sqrt() + 2.0 * t / tf.sqrt()));
        cusumsq.push(s2 / total_sq);
        lower.push(t / tf - c0);
        upper.push(t / tf + c0);
    }
    let cusum_inside = cusum.iter().zip(&cusum_band).all(|(w, b)| w.abs() <= *b);
    let cusumsq_inside = cusumsq.iter().zip(lower.iter().zip(&upper)).all(|(s, (lo, hi))| lo <= s && s <= hi);
    Ok(CusumReport {
        level,
        t: (1..=n).collect(),
        cusum,
        cusum_band,
        cusumsq,
        cusumsq_lower: lower,
        cusumsq_upper: upper,
        cusum_inside,
        cusumsq_inside,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub residuals: Vec<f64>,
    pub residual_mean: f64,
    pub residual_variance: f64,
    pub correlogram: AcfPacf,
    pub ljung_box: TestResult,
    pub cusum: CusumReport,
}

/// Pseudo residuals of `spec` on (x, regimes) with their correlogram,
/// Ljung-Box test and CUSUM/CUSUMSQ paths.
pub fn validate(spec: &TarSpec, x: &[f64], regimes: &[usize], max_lag: usize, level: f64) -> Result<ValidationReport> {
    let residuals = pseudo_residuals(spec, x, regimes)?;
    let correlogram = acf_pacf(&residuals, max_lag)?;
    let ljung_box = ljung_box(&residuals, max_lag, 0)?;
    let cusum = cusum_tests(&residuals, level)?;
    Ok(ValidationReport {
        residual_mean: mean(&residuals),
        residual_variance: crate::stats::variance(&residuals),
        residuals,
        correlogram,
        ljung_box,
        cusum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn noise(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    #[test]
    fn lag_zero_is_one() {
        let r = acf(&noise(100, 1), 5);
        assert_eq!(r[0], 1.0);
    }

    #[test]
    fn pacf_of_ar1_cuts_off() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut x = vec![0.0];
        for _ in 0..20_000 {
            let e: f64 = StandardNormal.sample(&mut rng);
            x.push(0.5 * x.last().unwrap() + e);
        }
        let p = pacf(&x, 4);
        assert_abs_diff_eq!(p[0], acf(&x, 1)[1], epsilon = 1e-15);
        assert_abs_diff_eq!(p[0], 0.5, epsilon = 0.02);
        for v in &p[1..] {
            assert!(v.abs() < 0.03);
        }
    }

    #[test]
    fn pacf_matches_regression_coefficient() {
        // lag-2 PACF equals (r2 - r1^2) / (1 - r1^2)
        let x = noise(500, 3);
        let r = acf(&x, 2);
        let p = pacf(&x, 2);
        assert_abs_diff_eq!(p[1], (r[2] - r[1] * r[1]) / (1.0 - r[1] * r[1]), epsilon = 1e-14);
    }

    #[test]
    fn cusum_paths_and_bands() {
        let e = noise(200, 4);
        let rep = cusum_tests(&e, 0.05).unwrap();
        assert_eq!(rep.cusum.len(), 200);
        assert_abs_diff_eq!(*rep.cusumsq.last().unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rep.cusum_band[199], 0.948 * (200f64.sqrt() + 2.0 * 200.0 / 200f64.sqrt()), epsilon = 1e-12);
    }

    #[test]
    fn cusumsq_constant_tracks_durbin_table() {
        // Durbin (1969) tabulates roughly 0.18 for n = 50 at the 5% level
        let c = cusumsq_c0(100, 0.05).unwrap();
        assert!(c > 0.17 && c < 0.20, "{c}");
    }

    #[test]
    fn degenerate_and_short_residuals() {
        assert!(matches!(cusum_tests(&[1.0; 30], 0.05), Err(Error::DegenerateResiduals(_))));
        assert!(matches!(cusum_tests(&[1.0; 10], 0.05), Err(Error::InsufficientData(_))));
        assert!(cusum_tests(&noise(30, 1), 0.2).is_err());
    }

    #[test]
    fn ljung_box_of_white_noise_is_not_extreme() {
        let lb = ljung_box(&noise(1000, 5), 10, 0).unwrap();
        assert!(lb.p_value > 0.001);
        assert_eq!(lb.df, 10.0);
    }

    #[test]
    fn max_lag_bound() {
        assert!(acf_pacf(&noise(40, 1), 10).is_err());
        assert!(acf_pacf(&noise(40, 1), 9).is_ok());
    }
}
