use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use serde::Serialize;

use super::params::{from_m, to_m, BekkParams, Mat2};
use crate::error::{Error, Result};
use crate::ols::ols;

#[derive(Debug, Clone, Serialize)]
pub struct FilterOutput {
    /// Index in the input series of the first residual (= p).
    pub offset: usize,
    pub residuals: Vec<[f64; 2]>,
    pub covariances: Vec<Mat2>,
    /// L_t^{-1} a_t with H_t = L_t L_t'. The first component is a_1 / sqrt(h_11).
    pub standardized: Vec<[f64; 2]>,
    pub loglik: Vec<f64>,
}

impl FilterOutput {
    pub fn log_likelihood(&self) -> f64 {
        self.loglik.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.residuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residuals.is_empty()
    }

    /// Time average of H_t.
    pub fn mean_covariance(&self) -> Mat2 {
        let n = self.covariances.len() as f64;
        let s = self.covariances.iter().fold(Matrix2::zeros(), |acc, h| acc + to_m(h));
        from_m(&(s / n))
    }

    /// Component i of every residual.
    pub fn residual_series(&self, i: usize) -> Vec<f64> {
        self.residuals.iter().map(|a| a[i]).collect()
    }

    pub fn standardized_series(&self, i: usize) -> Vec<f64> {
        self.standardized.iter().map(|a| a[i]).collect()
    }

    /// sqrt(h_ii,t)
    pub fn volatility(&self, i: usize) -> Vec<f64> {
        self.covariances.iter().map(|h| h[i][i].sqrt()).collect()
    }
}

fn v2(r: &[f64; 2]) -> Vector2<f64> {
    Vector2::new(r[0], r[1])
}

fn neg_part(a: &Vector2<f64>) -> Vector2<f64> {
    a.map(|v| if v < 0.0 { v } else { 0.0 })
}

fn neg_mask(a: &Vector2<f64>) -> Vector2<f64> {
    a.map(|v| if v < 0.0 { 1.0 } else { 0.0 })
}

fn check_inputs(params: &BekkParams, returns: &[[f64; 2]], h0: &Mat2) -> Result<Matrix2<f64>> {
    params.validate()?;
    if returns.len() <= params.p {
        return Err(Error::InsufficientData(format!("{} observations for a VAR({})", returns.len(), params.p)));
    }
    let h = to_m(h0);
    if (h - h.transpose()).abs().max() > 1e-12 || h.cholesky().is_none() {
        return Err(Error::InvalidInput("initial covariance must be symmetric positive definite".into()));
    }
    Ok(h)
}

fn residual(params: &BekkParams, returns: &[[f64; 2]], t: usize) -> Vector2<f64> {
    let mut m = params.mu_v();
    for (j, g) in params.gamma.iter().enumerate() {
        m += to_m(g) * v2(&returns[t - j - 1]);
    }
    v2(&returns[t]) - m
}

/// One step of the covariance recursion.
pub fn next_covariance(params: &BekkParams, a_prev: &Vector2<f64>, h_prev: &Matrix2<f64>) -> Matrix2<f64> {
    let u = params.lambda_m().transpose() * a_prev;
    let w = params.d_m().transpose() * neg_part(a_prev);
    let th = params.theta_m();
    let h = params.intercept_cov() + u * u.transpose() + th.transpose() * h_prev * th + w * w.transpose();
    (h + h.transpose()) * 0.5
}

/// Runs the VAR mean and A-BEKK covariance recursion. The first residual
/// (at t = p) uses `h0` as its covariance.
pub fn bekk_filter(params: &BekkParams, returns: &[[f64; 2]], h0: &Mat2) -> Result<FilterOutput> {
    let mut h = check_inputs(params, returns, h0)?;
    let n = returns.len() - params.p;
    let mut out = FilterOutput {
        offset: params.p,
        residuals: Vec::with_capacity(n),
        covariances: Vec::with_capacity(n),
        standardized: Vec::with_capacity(n),
        loglik: Vec::with_capacity(n),
    };
    let mut a_prev = Vector2::zeros();
    for t in params.p..returns.len() {
        if t > params.p {
            h = next_covariance(params, &a_prev, &h);
        }
        let a = residual(params, returns, t);
        let chol = h.cholesky().ok_or(Error::NonPositiveDefinite { t })?;
        let l = chol.l();
        let det = l[(0, 0)] * l[(0, 0)] * l[(1, 1)] * l[(1, 1)];
        let e = l.solve_lower_triangular(&a).ok_or(Error::NonPositiveDefinite { t })?;
        out.loglik.push(-(2.0 * PI).ln() - 0.5 * det.ln() - 0.5 * e.norm_squared());
        out.residuals.push([a[0], a[1]]);
        out.covariances.push(from_m(&h));
        out.standardized.push([e[0], e[1]]);
        a_prev = a;
    }
    Ok(out)
}

/// Sum of the per-observation log-likelihood contributions.
pub fn bekk_log_likelihood(params: &BekkParams, returns: &[[f64; 2]], h0: &Mat2) -> Result<f64> {
    Ok(bekk_filter(params, returns, h0)?.log_likelihood())
}

struct Delta {
    mu: Vector2<f64>,
    gamma: Vec<Matrix2<f64>>,
    c: Matrix2<f64>,
    lambda: Matrix2<f64>,
    theta: Matrix2<f64>,
    d: Matrix2<f64>,
}

/// Log-likelihood and its exact gradient with respect to
/// [`BekkParams::to_vec`], by forward propagation of dH_t and da_t.
pub fn log_likelihood_gradient(params: &BekkParams, returns: &[[f64; 2]], h0: &Mat2) -> Result<(f64, Vec<f64>)> {
    let mut h = check_inputs(params, returns, h0)?;
    let np = params.n_params();
    let deltas: Vec<Delta> = (0..np)
        .map(|k| {
            let mut e = vec![0.0; np];
            e[k] = 1.0;
            let d = BekkParams::from_vec(params.p, &e).expect("basis vector has the right length");
            Delta {
                mu: d.mu_v(),
                gamma: (0..params.p).map(|j| d.gamma_m(j)).collect(),
                c: d.c_m(),
                lambda: d.lambda_m(),
                theta: d.theta_m(),
                d: d.d_m(),
            }
        })
        .collect();
    let (c, lam, th, dm) = (params.c_m(), params.lambda_m(), params.theta_m(), params.d_m());
    let dcc: Vec<Matrix2<f64>> = deltas.iter().map(|d| d.c.transpose() * c + c.transpose() * d.c).collect();

    let mut dh = vec![Matrix2::<f64>::zeros(); np];
    let mut da_prev = vec![Vector2::<f64>::zeros(); np];
    let mut da = vec![Vector2::<f64>::zeros(); np];
    let mut a_prev = Vector2::zeros();
    let mut total = 0.0;
    let mut grad = vec![0.0; np];
    for t in params.p..returns.len() {
        if t > params.p {
            let z = neg_part(&a_prev);
            let mask = neg_mask(&a_prev);
            let u = lam.transpose() * a_prev;
            let w = dm.transpose() * z;
            for k in 0..np {
                let dl = &deltas[k];
                let du = dl.lambda.transpose() * a_prev + lam.transpose() * da_prev[k];
                let dw = dl.d.transpose() * z + dm.transpose() * da_prev[k].component_mul(&mask);
                let m = th.transpose() * h * dl.theta;
                dh[k] = dcc[k]
                    + du * u.transpose()
                    + u * du.transpose()
                    + m
                    + m.transpose()
                    + th.transpose() * dh[k] * th
                    + dw * w.transpose()
                    + w * dw.transpose();
            }
            h = next_covariance(params, &a_prev, &h);
        }
        let a = residual(params, returns, t);
        for (k, dl) in deltas.iter().enumerate() {
            let mut v = -dl.mu;
            for (j, g) in dl.gamma.iter().enumerate() {
                v -= g * v2(&returns[t - j - 1]);
            }
            da[k] = v;
        }
        let chol = h.cholesky().ok_or(Error::NonPositiveDefinite { t })?;
        let hinv = chol.inverse();
        let q = hinv * a;
        total += -(2.0 * PI).ln() - 0.5 * h.determinant().ln() - 0.5 * a.dot(&q);
        for k in 0..np {
            grad[k] += -0.5 * (hinv * dh[k]).trace() - q.dot(&da[k]) + 0.5 * q.dot(&(dh[k] * q));
        }
        a_prev = a;
        std::mem::swap(&mut da_prev, &mut da);
    }
    Ok((total, grad))
}

/// OLS fit of each VAR(p) equation. Returns (mu, Gamma_j, residual
/// covariance with divisor n).
pub fn var_ols(returns: &[[f64; 2]], p: usize) -> Result<([f64; 2], Vec<Mat2>, Mat2)> {
    let n = returns.len().saturating_sub(p);
    if n <= 2 * p + 1 {
        return Err(Error::InsufficientData(format!("{} observations for a VAR({p})", returns.len())));
    }
    let x = DMatrix::from_fn(n, 1 + 2 * p, |r, col| {
        if col == 0 {
            1.0
        } else {
            let j = (col - 1) / 2;
            returns[r + p - j - 1][(col - 1) % 2]
        }
    });
    let mut mu = [0.0; 2];
    let mut gamma = vec![[[0.0; 2]; 2]; p];
    let mut res = Vec::with_capacity(2);
    for i in 0..2 {
        let y = DVector::from_fn(n, |r, _| returns[r + p][i]);
        let fit = ols(&x, &y)?;
        mu[i] = fit.coef[0];
        for (j, g) in gamma.iter_mut().enumerate() {
            g[i] = [fit.coef[1 + 2 * j], fit.coef[2 + 2 * j]];
        }
        res.push(fit.residuals);
    }
    let cov = |a: &DVector<f64>, b: &DVector<f64>| a.dot(b) / n as f64;
    let s = [[cov(&res[0], &res[0]), cov(&res[0], &res[1])], [cov(&res[1], &res[0]), cov(&res[1], &res[1])]];
    Ok((mu, gamma, s))
}

/// Sample covariance of the OLS VAR(p) residuals, used to start the
/// covariance recursion.
pub fn sample_h0(returns: &[[f64; 2]], p: usize) -> Result<Mat2> {
    Ok(var_ols(returns, p)?.2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bekk::simulate::simulate_bekk;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

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

    fn data(n: usize, seed: u64) -> Vec<[f64; 2]> {
        simulate_bekk(&truth(), n, 500, seed).unwrap().returns
    }

    #[test]
    fn constant_covariance_without_dynamics() {
        let mut p = truth();
        p.lambda = [[0.0; 2]; 2];
        p.theta = [[0.0; 2]; 2];
        p.d = [[0.0; 2]; 2];
        let x = data(200, 1);
        let out = bekk_filter(&p, &x, &from_m(&p.intercept_cov())).unwrap();
        let cc = from_m(&p.intercept_cov());
        assert!(out.covariances.iter().all(|h| *h == cc));
    }

    #[test]
    fn symmetric_model_is_sign_invariant() {
        let p = truth().symmetric();
        let x = data(300, 2);
        let h0 = sample_h0(&x, 1).unwrap();
        let mut q = p.clone();
        q.mu = [-p.mu[0], -p.mu[1]];
        let neg: Vec<[f64; 2]> = x.iter().map(|r| [-r[0], -r[1]]).collect();
        let a = bekk_filter(&p, &x, &h0).unwrap();
        let b = bekk_filter(&q, &neg, &h0).unwrap();
        for (ha, hb) in a.covariances.iter().zip(&b.covariances) {
            for i in 0..2 {
                for j in 0..2 {
                    assert_abs_diff_eq!(ha[i][j], hb[i][j], epsilon = 1e-12);
                }
            }
        }
        assert_abs_diff_eq!(a.log_likelihood(), b.log_likelihood(), epsilon = 1e-9);
    }

    #[test]
    fn identity_covariance_zero_residuals() {
        let p = BekkParams {
            p: 0,
            mu: [0.0, 0.0],
            gamma: vec![],
            c: [[1.0, 0.0], [0.0, 1.0]],
            lambda: [[0.0; 2]; 2],
            theta: [[0.0; 2]; 2],
            d: [[0.0; 2]; 2],
        };
        let x = vec![[0.0, 0.0]; 25];
        let out = bekk_filter(&p, &x, &[[1.0, 0.0], [0.0, 1.0]]).unwrap();
        for l in &out.loglik {
            assert_abs_diff_eq!(*l, -(2.0 * PI).ln(), epsilon = 1e-15);
        }
        assert_abs_diff_eq!(out.log_likelihood(), -25.0 * (2.0 * PI).ln(), epsilon = 1e-12);
    }

    #[test]
    fn likelihood_is_the_sum_of_contributions() {
        let x = data(400, 3);
        let h0 = sample_h0(&x, 1).unwrap();
        let out = bekk_filter(&truth(), &x, &h0).unwrap();
        let total: f64 = out.loglik.iter().sum();
        assert_eq!(bekk_log_likelihood(&truth(), &x, &h0).unwrap(), total);
        let (ll, _) = log_likelihood_gradient(&truth(), &x, &h0).unwrap();
        assert_abs_diff_eq!(ll, total, epsilon = 1e-8 * total.abs());
    }

    #[test]
    fn analytic_gradient_matches_finite_differences() {
        let x = data(300, 4);
        let h0 = sample_h0(&x, 1).unwrap();
        let mut p = truth();
        p.lambda[0][1] = -0.07;
        p.d[1][0] = 0.12;
        let (_, g) = log_likelihood_gradient(&p, &x, &h0).unwrap();
        let base = p.to_vec();
        let scale = g.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        for (k, gk) in g.iter().enumerate() {
            let fd = |rel: f64| {
                let h = rel * (1.0 + base[k].abs());
                let mut up = base.clone();
                let mut dn = base.clone();
                up[k] += h;
                dn[k] -= h;
                let fu = bekk_log_likelihood(&BekkParams::from_vec(1, &up).unwrap(), &x, &h0).unwrap();
                let fdn = bekk_log_likelihood(&BekkParams::from_vec(1, &dn).unwrap(), &x, &h0).unwrap();
                (fu - fdn) / (2.0 * h)
            };
            let (f1, f2) = (fd(1e-5), fd(1e-6));
            assert!((f1 - f2).abs() <= 1e-4 * gk.abs().max(1e-3 * scale), "steps disagree at {k}");
            assert!((gk - f1).abs() <= 1e-4 * gk.abs().max(1e-3 * scale), "k {k}: {gk} vs {f1}");
        }
    }

    #[test]
    fn true_parameters_beat_perturbed_ones() {
        let x = data(4000, 5);
        let h0 = sample_h0(&x, 1).unwrap();
        let ll = bekk_log_likelihood(&truth(), &x, &h0).unwrap();
        let v = truth().to_vec();
        for k in 0..v.len() {
            for s in [-0.2, 0.2] {
                let mut w = v.clone();
                w[k] += s;
                if let Ok(l2) = bekk_log_likelihood(&BekkParams::from_vec(1, &w).unwrap(), &x, &h0) {
                    assert!(ll > l2, "perturbing {k} by {s}");
                }
            }
        }
    }

    #[test]
    fn negating_matrices_leaves_likelihood_unchanged() {
        let x = data(500, 6);
        let h0 = sample_h0(&x, 1).unwrap();
        let base = bekk_log_likelihood(&truth(), &x, &h0).unwrap();
        let neg = |m: Mat2| [[-m[0][0], -m[0][1]], [-m[1][0], -m[1][1]]];
        let mut p = truth();
        p.lambda = neg(p.lambda);
        p.theta = neg(p.theta);
        p.d = neg(p.d);
        p.c = [[-p.c[0][0], -p.c[0][1]], [0.0, -p.c[1][1]]];
        assert_eq!(bekk_log_likelihood(&p, &x, &h0).unwrap(), base);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn covariances_are_positive_definite(
            c11 in 0.05f64..1.0, c12 in -0.5f64..0.5, c22 in 0.05f64..1.0,
            l in proptest::array::uniform4(-0.4f64..0.4),
            t in proptest::array::uniform4(-0.6f64..0.6),
            d in proptest::array::uniform4(-0.4f64..0.4),
            seed in 0u64..1000,
        ) {
            let p = BekkParams {
                p: 1,
                mu: [0.0, 0.0],
                gamma: vec![[[0.1, 0.0], [0.0, 0.1]]],
                c: [[c11, c12], [0.0, c22]],
                lambda: [[l[0], l[1]], [l[2], l[3]]],
                theta: [[t[0], t[1]], [t[2], t[3]]],
                d: [[d[0], d[1]], [d[2], d[3]]],
            };
            let x = data(200, seed);
            let out = bekk_filter(&p, &x, &sample_h0(&x, 1).unwrap()).unwrap();
            for h in &out.covariances {
                prop_assert!((h[0][1] - h[1][0]).abs() <= 1e-12);
                prop_assert!(to_m(h).cholesky().is_some());
            }
        }
    }
}
