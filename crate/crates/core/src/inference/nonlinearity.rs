//! Threshold nonlinearity test based on an arranged autoregression.
//!
//! Cases (x_t; 1, x_{t-1}, ..., x_{t-k}) are sorted by z_{t-d}. Recursive
//! least squares over the sorted cases yields standardized predictive
//! residuals, which are white noise under linearity. Regressing them on the
//! AR regressors gives an F statistic that detects a coefficient change
//! along the threshold variable.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ols::{check_full_rank, f_test};

/// Share of arranged cases used to start the recursion.
pub const STARTUP_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, Serialize)]
pub struct DelayResult {
    pub delay: usize,
    pub f_statistic: f64,
    pub p_value: f64,
    pub df1: usize,
    pub df2: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct NonlinearityTest {
    /// Largest F over the candidate delays.
    pub f_statistic: f64,
    pub p_value: f64,
    pub best_delay: usize,
    pub per_delay: Vec<DelayResult>,
}

impl NonlinearityTest {
    pub fn rejects(&self, level: f64) -> bool {
        self.p_value < level
    }
}

fn arranged_f(x: &[f64], z: &[f64], k: usize, d: usize) -> Result<DelayResult> {
    let start = k.max(d);
    let n = x.len() - start;
    let p = k + 1;
    let mut order: Vec<usize> = (start..x.len()).collect();
    order.sort_by(|&a, &b| z[a - d].total_cmp(&z[b - d]));
    let row = |t: usize| -> DVector<f64> { DVector::from_fn(p, |j, _| if j == 0 { 1.0 } else { x[t - j] }) };

    let m0 = ((STARTUP_FRACTION * n as f64).ceil() as usize).max(p + 1);
    if n < m0 + p + 2 {
        return Err(Error::InsufficientData(format!("{n} arranged cases for order {k}")));
    }
    let mut xtx = DMatrix::<f64>::zeros(p, p);
    let mut xty = DVector::<f64>::zeros(p);
    for &t in &order[..m0] {
        let w = row(t);
        xtx += &w * w.transpose();
        xty += &w * x[t];
    }
    check_full_rank(&xtx)?;
    let mut pinv = xtx
        .try_inverse()
        .ok_or_else(|| Error::SingularDesign("startup block is singular".into()))?;
    let mut beta = &pinv * &xty;

    let m = n - m0;
    let mut eta = DVector::<f64>::zeros(m);
    let mut design = DMatrix::<f64>::zeros(m, p);
    for (i, &t) in order[m0..].iter().enumerate() {
        let w = row(t);
        let pw = &pinv * &w;
        let v = 1.0 + w.dot(&pw);
        let resid = x[t] - w.dot(&beta);
        eta[i] = resid / v.sqrt();
        design.row_mut(i).copy_from(&w.transpose());
        // Sherman-Morrison update of (X'X)^-1 and the coefficients
        beta += &pw * (resid / v);
        pinv -= &pw * pw.transpose() / v;
    }
    let dtd = design.transpose() * &design;
    check_full_rank(&dtd)?;
    let ssr_restricted = eta.norm_squared();
    if !(ssr_restricted > 0.0) {
        return Err(Error::SingularDesign("predictive residuals vanish identically".into()));
    }
    let coef = dtd
        .cholesky()
        .ok_or_else(|| Error::SingularDesign("residual regression is singular".into()))?
        .solve(&(design.transpose() * &eta));
    let ssr_full = (&eta - &design * coef).norm_squared();
    let df2 = m - p;
    let (f, pv) = f_test(ssr_restricted, ssr_full, p, df2);
    Ok(DelayResult { delay: d, f_statistic: f, p_value: pv, df1: p, df2 })
}

/// F test of linearity against a threshold alternative driven by `z`.
///
/// For each delay d the cases are arranged by z_{t-d}; the reported statistic
/// is the largest F over `d_set`, with that delay's p-value from
/// F(k + 1, m - k - 1), m being the number of predictive residuals.
pub fn nonlinearity_test(x: &[f64], z: &[f64], k: usize, d_set: &[usize]) -> Result<NonlinearityTest> {
    if x.len() != z.len() {
        return Err(Error::InvalidInput("x and z must have the same length".into()));
    }
    if x.len() <= 3 * (k + 1) {
        return Err(Error::InsufficientData(format!("{} observations for order {k}", x.len())));
    }
    if d_set.is_empty() {
        return Err(Error::InvalidInput("no candidate delays".into()));
    }
    let per_delay = d_set.iter().map(|&d| arranged_f(x, z, k, d)).collect::<Result<Vec<_>>>()?;
    let best = per_delay
        .iter()
        .max_by(|a, b| a.f_statistic.total_cmp(&b.f_statistic))
        .expect("non-empty");
    Ok(NonlinearityTest {
        f_statistic: best.f_statistic,
        p_value: best.p_value,
        best_delay: best.delay,
        per_delay: per_delay.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tar::presets::m2;
    use crate::tar::simulate_tar;

    #[test]
    fn constant_series_is_singular() {
        let x = vec![1.0; 100];
        let z: Vec<f64> = (0..100).map(|i| i as f64).collect();
        assert!(matches!(nonlinearity_test(&x, &z, 2, &[0]), Err(Error::SingularDesign(_))));
    }

    #[test]
    fn detects_m2_threshold() {
        let m = m2();
        let path = simulate_tar(&m.spec, m.z.as_ref().unwrap(), 300, 300, 9).unwrap();
        let t = nonlinearity_test(&path.x, &path.z, 3, &[0, 1]).unwrap();
        assert!(t.p_value < 0.01, "p = {}", t.p_value);
        assert_eq!(t.best_delay, 0);
    }

    #[test]
    fn short_series_rejected() {
        let x = vec![0.1, 0.3, -0.2, 0.5];
        assert!(nonlinearity_test(&x, &x, 1, &[0]).is_err());
    }
}
