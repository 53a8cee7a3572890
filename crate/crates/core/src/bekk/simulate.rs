use nalgebra::{Matrix2, Vector2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::filter::next_covariance;
use super::params::{from_m, BekkParams, Mat2};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct BekkPath {
    pub returns: Vec<[f64; 2]>,
    pub covariances: Vec<Mat2>,
}

/// Simulates n observations with Gaussian innovations after discarding
/// `burn_in` steps. The recursion starts from zero lags and H = C'C.
pub fn simulate_bekk(params: &BekkParams, n: usize, burn_in: usize, seed: u64) -> Result<BekkPath> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = params.p;
    let mut lags: Vec<Vector2<f64>> = vec![Vector2::zeros(); p];
    let mut h: Matrix2<f64> = params.intercept_cov();
    let mut a = Vector2::zeros();
    let mut path = BekkPath { returns: Vec::with_capacity(n), covariances: Vec::with_capacity(n) };
    for t in 0..n + burn_in {
        if t > 0 {
            h = next_covariance(params, &a, &h);
        }
        let l = h.cholesky().ok_or(Error::NonPositiveDefinite { t })?.l();
        let e = Vector2::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng));
        a = l * e;
        let mut r = params.mu_v() + a;
        for (j, g) in params.gamma.iter().enumerate() {
            r += super::params::to_m(g) * lags[j];
        }
        if p > 0 {
            lags.rotate_right(1);
            lags[0] = r;
        }
        if t >= burn_in {
            path.returns.push([r[0], r[1]]);
            path.covariances.push(from_m(&h));
        }
    }
    Ok(path)
}
