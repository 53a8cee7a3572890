use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row-major 2x2 matrix as stored in JSON: `[[m11, m12], [m21, m22]]`.
pub type Mat2 = [[f64; 2]; 2];

pub const BOVESPA_BEKK_JSON: &str = include_str!("../../presets/bovespa-bekk.json");

/// Below this |det| a matrix is treated as rank deficient.
pub const RANK_TOL: f64 = 1e-12;

/// Bivariate VAR(p) mean with an asymmetric BEKK(1,1) covariance:
///
/// R_t = mu + sum_j Gamma_j R_{t-j} + a_t,
/// H_t = C'C + lambda' a a' lambda + theta' H_{t-1} theta + D' zeta zeta' D,
///
/// with a and zeta = a * I(a < 0) taken at t-1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BekkParams {
    pub p: usize,
    pub mu: [f64; 2],
    pub gamma: Vec<Mat2>,
    /// Upper triangular; `c[1][0]` must be zero.
    pub c: Mat2,
    pub lambda: Mat2,
    pub theta: Mat2,
    pub d: Mat2,
}

pub(crate) fn to_m(a: &Mat2) -> Matrix2<f64> {
    Matrix2::new(a[0][0], a[0][1], a[1][0], a[1][1])
}

pub(crate) fn from_m(m: &Matrix2<f64>) -> Mat2 {
    [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]
}

impl BekkParams {
    pub fn n_params_for(p: usize) -> usize {
        2 + 4 * p + 3 + 12
    }

    pub fn n_params(&self) -> usize {
        Self::n_params_for(self.p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.gamma.len() != self.p {
            return Err(Error::InvalidSpec(format!("p = {} but {} mean matrices given", self.p, self.gamma.len())));
        }
        if self.c[1][0] != 0.0 {
            return Err(Error::InvalidSpec("C must be upper triangular".into()));
        }
        if !self.to_vec().iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidSpec("parameters must be finite".into()));
        }
        Ok(())
    }

    /// Positive definiteness of every H_t is guaranteed when C or theta has
    /// full rank.
    pub fn admissible(&self) -> bool {
        to_m(&self.c).determinant().abs() > RANK_TOL || to_m(&self.theta).determinant().abs() > RANK_TOL
    }

    pub fn c_m(&self) -> Matrix2<f64> {
        to_m(&self.c)
    }
    pub fn lambda_m(&self) -> Matrix2<f64> {
        to_m(&self.lambda)
    }
    pub fn theta_m(&self) -> Matrix2<f64> {
        to_m(&self.theta)
    }
    pub fn d_m(&self) -> Matrix2<f64> {
        to_m(&self.d)
    }
    pub fn gamma_m(&self, j: usize) -> Matrix2<f64> {
        to_m(&self.gamma[j])
    }
    pub fn mu_v(&self) -> Vector2<f64> {
        Vector2::new(self.mu[0], self.mu[1])
    }

    /// C'C
    pub fn intercept_cov(&self) -> Matrix2<f64> {
        let c = self.c_m();
        c.transpose() * c
    }

    /// Flat order: mu, Gamma_1..Gamma_p (row-major), c11 c12 c22, lambda,
    /// theta, D (row-major).
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.n_params());
        v.extend(self.mu);
        for g in &self.gamma {
            v.extend(g.iter().flatten());
        }
        v.extend([self.c[0][0], self.c[0][1], self.c[1][1]]);
        for m in [&self.lambda, &self.theta, &self.d] {
            v.extend(m.iter().flatten());
        }
        v
    }

    /// Inverse of [`BekkParams::to_vec`]. The map is linear in `v`.
    pub fn from_vec(p: usize, v: &[f64]) -> Result<Self> {
        if v.len() != Self::n_params_for(p) {
            return Err(Error::InvalidInput(format!("expected {} parameters, got {}", Self::n_params_for(p), v.len())));
        }
        let m = |o: usize| [[v[o], v[o + 1]], [v[o + 2], v[o + 3]]];
        let gamma = (0..p).map(|j| m(2 + 4 * j)).collect();
        let o = 2 + 4 * p;
        Ok(BekkParams {
            p,
            mu: [v[0], v[1]],
            gamma,
            c: [[v[o], v[o + 1]], [0.0, v[o + 2]]],
            lambda: m(o + 3),
            theta: m(o + 7),
            d: m(o + 11),
        })
    }

    /// Names matching [`BekkParams::to_vec`], e.g. `mu_1`, `gamma1_12`, `c_22`.
    pub fn names(p: usize) -> Vec<String> {
        let mut n = vec!["mu_1".to_string(), "mu_2".to_string()];
        let idx = ["11", "12", "21", "22"];
        for j in 1..=p {
            n.extend(idx.iter().map(|i| format!("gamma{j}_{i}")));
        }
        n.extend(["c_11", "c_12", "c_22"].map(String::from));
        for m in ["lambda", "theta", "d"] {
            n.extend(idx.iter().map(|i| format!("{m}_{i}")));
        }
        n
    }

    /// Sign flips that leave every H_t unchanged, chosen so that C has a
    /// non-negative diagonal and lambda_11, theta_11, d_11 >= 0. Returns the
    /// per-parameter sign applied (+1 or -1) so standard errors and
    /// t-statistics can follow.
    pub fn apply_sign_convention(&mut self) -> Vec<f64> {
        let o = 2 + 4 * self.p;
        let mut signs = vec![1.0; self.n_params()];
        if self.c[0][0] < 0.0 {
            self.c[0][0] = -self.c[0][0];
            self.c[0][1] = -self.c[0][1];
            signs[o] = -1.0;
            signs[o + 1] = -1.0;
        }
        if self.c[1][1] < 0.0 {
            self.c[1][1] = -self.c[1][1];
            signs[o + 2] = -1.0;
        }
        for (k, m) in [&mut self.lambda, &mut self.theta, &mut self.d].into_iter().enumerate() {
            if m[0][0] < 0.0 {
                for v in m.iter_mut().flatten() {
                    *v = -*v;
                }
                let start = o + 3 + 4 * k;
                signs[start..start + 4].iter_mut().for_each(|s| *s = -1.0);
            }
        }
        signs
    }

    /// Drops the asymmetric term.
    pub fn symmetric(&self) -> Self {
        BekkParams { d: [[0.0; 2]; 2], ..self.clone() }
    }
}

/// Reference VAR(1)-A-BEKK(1,1) estimates for (Bovespa, S&P 500).
pub fn bovespa_bekk() -> BekkParams {
    serde_json::from_str(BOVESPA_BEKK_JSON).expect("bundled preset parses")
}
