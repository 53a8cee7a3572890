//! Ordinary least squares with an explicit rank check.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative eigenvalue floor of the column-normalized X'X below which the
/// design is treated as rank deficient.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct OlsFit {
    pub coef: DVector<f64>,
    pub residuals: DVector<f64>,
    pub ssr: f64,
    /// SSR / (n - p)
    pub sigma2: f64,
    /// Classical standard errors sqrt(sigma2 * diag((X'X)^-1)).
    pub se: DVector<f64>,
    pub n: usize,
    pub p: usize,
}

impl OlsFit {
    pub fn t_stats(&self) -> DVector<f64> {
        self.coef.component_div(&self.se)
    }
}

/// Checks that `xtx` is numerically full rank. Columns are scaled to unit
/// diagonal first so the test does not depend on regressor units.
pub fn check_full_rank(xtx: &DMatrix<f64>) -> Result<()> {
    let p = xtx.nrows();
    let mut scaled = xtx.clone();
    for i in 0..p {
        let di = xtx[(i, i)];
        if !(di > 0.0) || !di.is_finite() {
            return Err(Error::SingularDesign(format!("column {i} is identically zero")));
        }
    }
    for i in 0..p {
        for j in 0..p {
            scaled[(i, j)] = xtx[(i, j)] / (xtx[(i, i)] * xtx[(j, j)]).sqrt();
        }
    }
    let eig = scaled.symmetric_eigenvalues();
    let max = eig.iter().cloned().fold(f64::MIN, f64::max);
    let min = eig.iter().cloned().fold(f64::MAX, f64::min);
    if !(min > RANK_TOL * max) {
        return Err(Error::SingularDesign(format!(
            "condition of normalized X'X too large (eigenvalues {min:e} .. {max:e})"
        )));
    }
    Ok(())
}

/// Fits y = X b + e by least squares.
pub fn ols(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<OlsFit> {
    let (n, p) = x.shape();
    if n <= p {
        return Err(Error::InsufficientData(format!("{n} observations for {p} regressors")));
    }
    let xtx = x.transpose() * x;
    check_full_rank(&xtx)?;
    let chol = xtx
        .clone()
        .cholesky()
        .ok_or_else(|| Error::SingularDesign("X'X is not positive definite".into()))?;
    let coef = chol.solve(&(x.transpose() * y));
    let residuals = y - x * &coef;
    let ssr = residuals.norm_squared();
    let sigma2 = ssr / (n - p) as f64;
    let inv = chol.inverse();
    let se = DVector::from_iterator(p, (0..p).map(|i| (sigma2 * inv[(i, i)]).sqrt()));
    Ok(OlsFit { coef, residuals, ssr, sigma2, se, n, p })
}

/// F statistic and p-value for H0: the last `q` coefficients are zero,
/// comparing a restricted SSR with the unrestricted fit.
pub fn f_test(ssr_restricted: f64, ssr_full: f64, q: usize, df_resid: usize) -> (f64, f64) {
    use statrs::distribution::{ContinuousCDF, FisherSnedecor};
    let f = ((ssr_restricted - ssr_full) / q as f64) / (ssr_full / df_resid as f64);
    let dist = FisherSnedecor::new(q as f64, df_resid as f64).expect("positive degrees of freedom");
    let p = if f.is_finite() { dist.sf(f.max(0.0)) } else { 0.0 };
    (f, p)
}
