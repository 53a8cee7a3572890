use nalgebra::{DMatrix, Matrix2};
use serde::{Deserialize, Serialize};

use super::filter::{bekk_log_likelihood, log_likelihood_gradient, var_ols};
use super::optim::{bfgs, BfgsConfig};
use super::params::{from_m, to_m, BekkParams, Mat2};
use crate::error::{Error, Result};

pub const MIN_OBSERVATIONS: usize = 250;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct FitConfig {
    #[serde(default)]
    pub optimizer: BfgsConfig,
    /// Starting point; defaults to OLS VAR coefficients with C'C = 0.1 S,
    /// lambda = 0.25 I, theta = 0.9 I, D = 0.2 I.
    #[serde(default)]
    pub init: Option<BekkParams>,
    /// Initial covariance; defaults to the OLS VAR residual covariance.
    #[serde(default)]
    pub h0: Option<Mat2>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitEntry {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub t_stat: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitBlock {
    pub block: String,
    pub entries: Vec<FitEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BekkFit {
    pub params: BekkParams,
    pub log_likelihood: f64,
    pub h0: Mat2,
    pub n_obs: usize,
    pub converged: bool,
    pub iterations: usize,
    pub evaluations: usize,
    pub grad_norm: f64,
    pub message: String,
    pub names: Vec<String>,
    pub std_errors: Vec<f64>,
    pub t_stats: Vec<f64>,
}

impl BekkFit {
    /// Estimates grouped as mean, C, lambda, theta and D blocks.
    pub fn table(&self) -> Vec<FitBlock> {
        let values = self.params.to_vec();
        let o = 2 + 4 * self.params.p;
        let bounds = [
            (format!("VAR({})", self.params.p), 0, o),
            ("C".to_string(), o, o + 3),
            ("lambda".to_string(), o + 3, o + 7),
            ("theta".to_string(), o + 7, o + 11),
            ("D".to_string(), o + 11, o + 15),
        ];
        bounds
            .into_iter()
            .map(|(block, a, b)| FitBlock {
                block,
                entries: (a..b)
                    .map(|i| FitEntry {
                        name: self.names[i].clone(),
                        estimate: values[i],
                        std_error: self.std_errors[i],
                        t_stat: self.t_stats[i],
                    })
                    .collect(),
            })
            .collect()
    }
}

fn default_init(returns: &[[f64; 2]], p: usize) -> Result<BekkParams> {
    let (mu, gamma, s) = var_ols(returns, p)?;
    let l = (to_m(&s) * 0.1)
        .cholesky()
        .ok_or_else(|| Error::SingularDesign("VAR residual covariance is not positive definite".into()))?
        .l();
    let c = from_m(&l.transpose());
    let diag = |v: f64| from_m(&(Matrix2::identity() * v));
    Ok(BekkParams { p, mu, gamma, c: [[c[0][0], c[0][1]], [0.0, c[1][1]]], lambda: diag(0.25), theta: diag(0.9), d: diag(0.2) })
}

/// Indices of parameters measured in return units (mu and C).
fn level_indices(p: usize) -> Vec<usize> {
    let o = 2 + 4 * p;
    vec![0, 1, o, o + 1, o + 2]
}

/// Maximum-likelihood fit of a VAR(p)-A-BEKK(1,1) by BFGS. Returns are
/// rescaled to unit average variance during optimisation; inadmissible
/// points are rejected by the line search. Standard errors come from the
/// inverse of a central-difference Hessian of the analytic gradient. The
/// reported parameters satisfy the sign convention of
/// [`BekkParams::apply_sign_convention`].
pub fn fit_bekk(returns: &[[f64; 2]], p: usize, config: &FitConfig) -> Result<BekkFit> {
    if returns.len() < MIN_OBSERVATIONS {
        return Err(Error::InsufficientData(format!(
            "{} observations, at least {MIN_OBSERVATIONS} required",
            returns.len()
        )));
    }
    let var = |i: usize| {
        let m = returns.iter().map(|r| r[i]).sum::<f64>() / returns.len() as f64;
        returns.iter().map(|r| (r[i] - m).powi(2)).sum::<f64>() / returns.len() as f64
    };
    let avg = 0.5 * (var(0) + var(1));
    if !(avg > 0.0) {
        return Err(Error::InvalidInput("returns have zero variance".into()));
    }
    let scale = 1.0 / avg.sqrt();
    let scaled: Vec<[f64; 2]> = returns.iter().map(|r| [r[0] * scale, r[1] * scale]).collect();
    let h0 = match config.h0 {
        Some(h) => h,
        None => var_ols(returns, p)?.2,
    };
    let h0s = from_m(&(to_m(&h0) * (scale * scale)));
    let levels = level_indices(p);
    let mut init = match &config.init {
        Some(i) => {
            if i.p != p {
                return Err(Error::InvalidInput(format!("initial parameters have p = {}, expected {p}", i.p)));
            }
            i.to_vec()
        }
        None => default_init(returns, p)?.to_vec(),
    };
    for &i in &levels {
        init[i] *= scale;
    }

    let n = (returns.len() - p) as f64;
    let objective = |th: &[f64]| -> Option<(f64, Vec<f64>)> {
        let params = BekkParams::from_vec(p, th).ok()?;
        let (ll, g) = log_likelihood_gradient(&params, &scaled, &h0s).ok()?;
        ll.is_finite().then(|| (-ll / n, g.iter().map(|v| -v / n).collect()))
    };
    let res = bfgs(objective, &init, &config.optimizer)
        .ok_or_else(|| Error::InvalidInput("starting parameters are inadmissible".into()))?;

    let np = res.x.len();
    let mut hess = DMatrix::zeros(np, np);
    for j in 0..np {
        let h = 1e-5 * (1.0 + res.x[j].abs());
        let mut up = res.x.clone();
        let mut dn = res.x.clone();
        up[j] += h;
        dn[j] -= h;
        let gu = objective(&up);
        let gd = objective(&dn);
        if let (Some((_, gu)), Some((_, gd))) = (gu, gd) {
            for i in 0..np {
                hess[(i, j)] = n * (gu[i] - gd[i]) / (2.0 * h);
            }
        } else {
            hess[(j, j)] = f64::NAN;
        }
    }
    let hess = (&hess + hess.transpose()) * 0.5;
    let cov = if hess.iter().all(|v| v.is_finite()) { hess.try_inverse() } else { None };
    let mut se: Vec<f64> = (0..np)
        .map(|i| match &cov {
            Some(c) if c[(i, i)] > 0.0 => c[(i, i)].sqrt(),
            _ => f64::NAN,
        })
        .collect();

    let mut theta = res.x.clone();
    for &i in &levels {
        theta[i] /= scale;
        se[i] /= scale;
    }
    let mut params = BekkParams::from_vec(p, &theta)?;
    params.apply_sign_convention();
    let values = params.to_vec();
    let t_stats = values.iter().zip(&se).map(|(v, s)| v / s).collect();
    let log_likelihood = bekk_log_likelihood(&params, returns, &h0)?;
    Ok(BekkFit {
        params,
        log_likelihood,
        h0,
        n_obs: returns.len() - p,
        converged: res.converged,
        iterations: res.iterations,
        evaluations: res.evaluations,
        grad_norm: res.grad_norm(),
        message: res.message,
        names: BekkParams::names(p),
        std_errors: se,
        t_stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bekk::simulate::simulate_bekk;

    fn truth() -> BekkParams {
        BekkParams {
            p: 1,
            mu: [0.05, 0.02],
            gamma: vec![[[0.1, 0.05], [0.03, -0.1]]],
            c: [[0.3, 0.1], [0.0, 0.25]],
            lambda: [[0.3, 0.05], [0.1, 0.25]],
            theta: [[0.85, 0.02], [0.02, 0.85]],
            d: [[0.3, 0.05], [0.05, 0.3]],
        }
    }

    #[test]
    fn recovers_simulated_parameters() {
        let x = simulate_bekk(&truth(), 4000, 500, 11).unwrap().returns;
        let fit = fit_bekk(&x, 1, &FitConfig::default()).unwrap();
        assert!(fit.converged, "{}", fit.message);
        let est = fit.params.to_vec();
        let tv = truth().to_vec();
        let inside = est.iter().zip(&tv).zip(&fit.std_errors).filter(|((e, t), s)| (*e - *t).abs() < 3.0 * *s).count();
        assert!(inside >= 19, "{inside} of 21 within 3 se");
        let cc = (fit.params.intercept_cov() - truth().intercept_cov()).norm();
        assert!(cc < 0.05, "C'C error {cc}");
    }

    #[test]
    fn restart_at_the_optimum_is_immediate() {
        let x = simulate_bekk(&truth(), 1000, 500, 12).unwrap().returns;
        let fit = fit_bekk(&x, 1, &FitConfig::default()).unwrap();
        let cfg = FitConfig { init: Some(fit.params.clone()), h0: Some(fit.h0), ..Default::default() };
        let again = fit_bekk(&x, 1, &cfg).unwrap();
        assert!(again.iterations <= 2, "{} iterations", again.iterations);
        assert!((again.log_likelihood - fit.log_likelihood).abs() < 1e-6);
    }

    #[test]
    fn short_series_is_rejected() {
        let x = simulate_bekk(&truth(), 100, 10, 1).unwrap().returns;
        assert!(matches!(fit_bekk(&x, 1, &FitConfig::default()), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn table_has_five_blocks() {
        let x = simulate_bekk(&truth(), 600, 200, 13).unwrap().returns;
        let fit = fit_bekk(&x, 1, &FitConfig::default()).unwrap();
        let t = fit.table();
        assert_eq!(t.iter().map(|b| b.entries.len()).collect::<Vec<_>>(), vec![6, 3, 4, 4, 4]);
        assert!(fit.params.c[0][0] >= 0.0 && fit.params.lambda[0][0] >= 0.0);
    }
}
