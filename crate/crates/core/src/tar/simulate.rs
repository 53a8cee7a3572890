use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use super::spec::{TarSpec, ZProcessSpec};
use crate::error::{Error, Result};
use crate::stats::{kurtosis, skewness, SampleSummary};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TarPath {
    pub x: Vec<f64>,
    pub z: Vec<f64>,
    pub regimes: Vec<usize>,
}

/// Simulates `burn_in + n` steps and returns the last `n`.
///
/// Pre-sample values of X are zero. A Gaussian AR(1) Z starts from its
/// stationary law; an observed Z must supply at least `burn_in + n` values,
/// of which the first `burn_in + n` are used. Deterministic given `seed`.
pub fn simulate_tar(spec: &TarSpec, z: &ZProcessSpec, n: usize, burn_in: usize, seed: u64) -> Result<TarPath> {
    spec.ensure_stationary()?;
    z.validate()?;
    if n < spec.max_order().max(1) {
        return Err(Error::InvalidInput(format!("path length {n} shorter than the largest order")));
    }
    let total = n + burn_in;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zs: Vec<f64> = match z {
        ZProcessSpec::GaussianAr1 { phi, tau_var, mean } => {
            let sd = z.stationary_sd().expect("gaussian");
            let tau = tau_var.sqrt();
            let mut out = Vec::with_capacity(total);
            let e: f64 = StandardNormal.sample(&mut rng);
            let mut cur = mean + sd * e;
            out.push(cur);
            for _ in 1..total {
                let e: f64 = StandardNormal.sample(&mut rng);
                cur = mean + phi * (cur - mean) + tau * e;
                out.push(cur);
            }
            out
        }
        ZProcessSpec::Observed { series } => {
            if series.len() < total {
                return Err(Error::InsufficientData(format!(
                    "observed Z has {} values, simulation needs {total}",
                    series.len()
                )));
            }
            series[..total].to_vec()
        }
    };
    let k = spec.max_order();
    // lags kept most recent first
    let mut lags = vec![0.0; k];
    let mut x = Vec::with_capacity(n);
    let mut regimes = Vec::with_capacity(n);
    for (t, &zt) in zs.iter().enumerate() {
        let j = spec.regime_of(zt);
        let r = spec.regime(j);
        let e: f64 = StandardNormal.sample(&mut rng);
        let xt = r.predict(&lags) + r.h * e;
        if k > 0 {
            lags.rotate_right(1);
            lags[0] = xt;
        }
        if t >= burn_in {
            x.push(xt);
            regimes.push(j);
        }
    }
    Ok(TarPath { x, z: zs[burn_in..].to_vec(), regimes })
}

/// Sample skewness and kurtosis across independent replications.
#[derive(Debug, Clone, Serialize)]
pub struct ReplicationSummary {
    pub reps: usize,
    pub len: usize,
    pub burn_in: usize,
    pub skewness: SampleSummary,
    pub kurtosis: SampleSummary,
    #[serde(skip)]
    pub skewness_draws: Vec<f64>,
    #[serde(skip)]
    pub kurtosis_draws: Vec<f64>,
}

/// Runs `reps` simulations in parallel; replication i uses seed `base_seed + i`,
/// so the result does not depend on thread scheduling.
pub fn replicate_moments(
    spec: &TarSpec,
    z: &ZProcessSpec,
    reps: usize,
    len: usize,
    burn_in: usize,
    base_seed: u64,
) -> Result<ReplicationSummary> {
    if reps < 2 {
        return Err(Error::InvalidInput("at least two replications are needed".into()));
    }
    let stats: Vec<(f64, f64)> = (0..reps)
        .into_par_iter()
        .map(|i| {
            let path = simulate_tar(spec, z, len, burn_in, base_seed.wrapping_add(i as u64))?;
            Ok((skewness(&path.x), kurtosis(&path.x)))
        })
        .collect::<Result<_>>()?;
    let (skew, kurt): (Vec<f64>, Vec<f64>) = stats.into_iter().unzip();
    Ok(ReplicationSummary {
        reps,
        len,
        burn_in,
        skewness: SampleSummary::two_sd(&skew),
        kurtosis: SampleSummary::two_sd(&kurt),
        skewness_draws: skew,
        kurtosis_draws: kurt,
    })
}
