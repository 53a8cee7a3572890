//! Gibbs sampler for the regime coefficients and noise variances of a TAR
//! model with known structure.
//!
//! Each regime is a Bayesian linear regression. Two prior families are
//! supported:
//!
//! - independent (default): theta_j ~ N(m_j, V_j), (h^(j))^2 ~ IG(alpha0, beta0);
//! - conjugate: theta_j | h^2 ~ N(m_j, h^2 V_j), (h^(j))^2 ~ IG(alpha0, beta0).
//!
//! The sampler alternates theta_j | h_j^2 (normal) and h_j^2 | theta_j
//! (inverse gamma). Only the regression's sufficient statistics X'X, X'y and
//! y'y enter an iteration.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use super::identify::StructureCandidate;
use crate::error::{Error, Result};
use crate::stats::{mean, quantile_sorted, std_dev, variance};
use crate::tar::spec::regime_index;
use crate::tar::{Regime, TarSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefPrior {
    pub mean: Vec<f64>,
    /// Row-major covariance (or covariance scale under the conjugate prior).
    pub cov: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorSpec {
    /// One entry per regime, dimension k_j + 1 (intercept first).
    pub coef: Vec<CoefPrior>,
    pub alpha0: f64,
    pub beta0: f64,
    #[serde(default)]
    pub conjugate: bool,
}

impl PriorSpec {
    /// theta_j ~ N(0, 10^2 I) and h_j^2 ~ IG(2.1, 0.1 var(x)).
    pub fn default_for(x: &[f64], structure: &StructureCandidate) -> Self {
        let coef = structure
            .orders
            .iter()
            .map(|&k| CoefPrior {
                mean: vec![0.0; k + 1],
                cov: (0..=k).map(|i| (0..=k).map(|j| if i == j { 100.0 } else { 0.0 }).collect()).collect(),
            })
            .collect();
        PriorSpec { coef, alpha0: 2.1, beta0: 0.1 * variance(x), conjugate: false }
    }

    fn validate(&self, structure: &StructureCandidate) -> Result<()> {
        if self.coef.len() != structure.l {
            return Err(Error::InvalidInput(format!("prior has {} regimes, structure {}", self.coef.len(), structure.l)));
        }
        if !(self.alpha0 > 0.0 && self.beta0 > 0.0) {
            return Err(Error::InvalidInput("inverse-gamma shape and scale must be positive".into()));
        }
        for (j, (c, &k)) in self.coef.iter().zip(&structure.orders).enumerate() {
            if c.mean.len() != k + 1 || c.cov.len() != k + 1 || c.cov.iter().any(|r| r.len() != k + 1) {
                return Err(Error::InvalidInput(format!("prior for regime {j} must have dimension {}", k + 1)));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GibbsConfig {
    pub iters: usize,
    pub burn_in: usize,
    pub seed: u64,
}

impl Default for GibbsConfig {
    fn default() -> Self {
        GibbsConfig { iters: 6000, burn_in: 1000, seed: 0 }
    }
}

/// Posterior mean, standard deviation and a central credible interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamSummary {
    pub name: String,
    pub mean: f64,
    pub sd: f64,
    pub level: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PosteriorDraws {
    pub iters: usize,
    pub burn_in: usize,
    pub structure: StructureCandidate,
    pub n_per_regime: Vec<usize>,
    /// Per regime a0, a1, ..., a_k, then h2; e.g. `a0_1`, `a1_2`, `h2_2`.
    pub names: Vec<String>,
    /// Retained (post burn-in) draws, one row per iteration.
    #[serde(skip)]
    pub draws: Vec<Vec<f64>>,
    /// 90% summaries of every parameter.
    pub summaries: Vec<ParamSummary>,
    /// Split-chain potential scale reduction of each h^2.
    pub rhat_variance: Vec<f64>,
}

impl PosteriorDraws {
    pub fn column(&self, i: usize) -> Vec<f64> {
        self.draws.iter().map(|d| d[i]).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn summarize(&self, i: usize, level: f64) -> ParamSummary {
        let mut col = self.column(i);
        let m = mean(&col);
        let sd = std_dev(&col);
        col.sort_by(f64::total_cmp);
        let tail = (1.0 - level) / 2.0;
        ParamSummary {
            name: self.names[i].clone(),
            mean: m,
            sd,
            level,
            lower: quantile_sorted(&col, tail),
            upper: quantile_sorted(&col, 1.0 - tail),
        }
    }

    /// Model at the posterior means, with h = sqrt(E[h^2]).
    pub fn posterior_mean_spec(&self) -> Result<TarSpec> {
        let mut regimes = Vec::with_capacity(self.structure.l);
        let mut i = 0;
        for &k in &self.structure.orders {
            let coef: Vec<f64> = (0..=k).map(|c| self.summaries[i + c].mean).collect();
            let h2 = self.summaries[i + k + 1].mean;
            regimes.push(Regime::new(coef[0], coef[1..].to_vec(), h2.sqrt()));
            i += k + 2;
        }
        TarSpec::new(self.structure.thresholds.clone(), regimes)
    }
}

struct RegimeData {
    xtx: DMatrix<f64>,
    xty: DVector<f64>,
    yty: f64,
    n: usize,
    prior_prec: DMatrix<f64>,
    prior_mean: DVector<f64>,
    prior_prec_mean: DVector<f64>,
}

fn build_regimes(x: &[f64], z: &[f64], structure: &StructureCandidate, prior: &PriorSpec) -> Result<Vec<RegimeData>> {
    let k = structure.max_order();
    let mut out = Vec::with_capacity(structure.l);
    for (j, (&kj, cp)) in structure.orders.iter().zip(&prior.coef).enumerate() {
        let p = kj + 1;
        let mut xtx = DMatrix::zeros(p, p);
        let mut xty = DVector::zeros(p);
        let mut yty = 0.0;
        let mut n = 0;
        for t in k..x.len() {
            if regime_index(&structure.thresholds, z[t]) != j {
                continue;
            }
            let w = DVector::from_fn(p, |c, _| if c == 0 { 1.0 } else { x[t - c] });
            xtx += &w * w.transpose();
            xty += &w * x[t];
            yty += x[t] * x[t];
            n += 1;
        }
        if n == 0 {
            return Err(Error::EmptyRegime(j));
        }
        let cov = DMatrix::from_fn(p, p, |a, b| cp.cov[a][b]);
        let prior_prec = cov
            .cholesky()
            .ok_or_else(|| Error::InvalidInput(format!("prior covariance of regime {j} is not positive definite")))?
            .inverse();
        let prior_mean = DVector::from_column_slice(&cp.mean);
        let prior_prec_mean = &prior_prec * &prior_mean;
        out.push(RegimeData { xtx, xty, yty, n, prior_prec, prior_mean, prior_prec_mean });
    }
    Ok(out)
}

fn split_rhat(draws: &[f64]) -> f64 {
    let half = draws.len() / 2;
    if half < 2 {
        return f64::NAN;
    }
    let (a, b) = (&draws[..half], &draws[draws.len() - half..]);
    let (ma, mb) = (mean(a), mean(b));
    let w = 0.5 * (variance(a) + variance(b));
    let grand = 0.5 * (ma + mb);
    let bvar = half as f64 * ((ma - grand).powi(2) + (mb - grand).powi(2));
    let n = half as f64;
    let vplus = (n - 1.0) / n * w + bvar / n;
    (vplus / w).sqrt()
}

/// Draws from the posterior of every theta_j and (h^(j))^2 given the
/// structure. Regimes are assigned by z_t over t = k..T-1, k = max k_j.
pub fn fit_gibbs(
    x: &[f64],
    z: &[f64],
    structure: &StructureCandidate,
    prior: &PriorSpec,
    config: GibbsConfig,
) -> Result<PosteriorDraws> {
    if x.len() != z.len() {
        return Err(Error::InvalidInput("x and z must have the same length".into()));
    }
    if config.iters <= config.burn_in {
        return Err(Error::InvalidInput("iterations must exceed burn-in".into()));
    }
    if x.len() <= structure.max_order() {
        return Err(Error::InsufficientData("series shorter than the largest order".into()));
    }
    prior.validate(structure)?;
    let data = build_regimes(x, z, structure, prior)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut names = Vec::new();
    for (j, &k) in structure.orders.iter().enumerate() {
        for c in 0..=k {
            names.push(format!("a{c}_{}", j + 1));
        }
        names.push(format!("h2_{}", j + 1));
    }

    let start_var = variance(&x[structure.max_order()..]).max(f64::MIN_POSITIVE);
    let mut h2: Vec<f64> = vec![start_var; structure.l];
    let mut kept = Vec::with_capacity(config.iters - config.burn_in);
    for it in 0..config.iters {
        let mut row = Vec::with_capacity(names.len());
        for (j, d) in data.iter().enumerate() {
            let p = d.xty.len();
            let (prec, rhs) = if prior.conjugate {
                ((&d.prior_prec + &d.xtx) / h2[j], (&d.prior_prec_mean + &d.xty) / h2[j])
            } else {
                (&d.prior_prec + &d.xtx / h2[j], &d.prior_prec_mean + &d.xty / h2[j])
            };
            let chol = prec
                .cholesky()
                .ok_or_else(|| Error::SingularDesign(format!("posterior precision of regime {j} is not positive definite")))?;
            let post_mean = chol.solve(&rhs);
            let u = DVector::from_fn(p, |_, _| StandardNormal.sample(&mut rng));
            let shift = chol
                .l()
                .transpose()
                .solve_upper_triangular(&u)
                .expect("triangular factor has a positive diagonal");
            let theta = post_mean + shift;

            let ssr = (d.yty - 2.0 * theta.dot(&d.xty) + theta.dot(&(&d.xtx * &theta))).max(0.0);
            let (shape, rate) = if prior.conjugate {
                let dev = &theta - &d.prior_mean;
                (
                    prior.alpha0 + 0.5 * (d.n + p) as f64,
                    prior.beta0 + 0.5 * (ssr + dev.dot(&(&d.prior_prec * &dev))),
                )
            } else {
                (prior.alpha0 + 0.5 * d.n as f64, prior.beta0 + 0.5 * ssr)
            };
            let g: f64 = Gamma::new(shape, 1.0 / rate)
                .map_err(|e| Error::InvalidInput(format!("gamma parameters: {e}")))?
                .sample(&mut rng);
            h2[j] = 1.0 / g;
            row.extend(theta.iter());
            row.push(h2[j]);
        }
        if it >= config.burn_in {
            kept.push(row);
        }
    }

    let mut out = PosteriorDraws {
        iters: config.iters,
        burn_in: config.burn_in,
        structure: structure.clone(),
        n_per_regime: data.iter().map(|d| d.n).collect(),
        names,
        draws: kept,
        summaries: Vec::new(),
        rhat_variance: Vec::new(),
    };
    out.summaries = (0..out.names.len()).map(|i| out.summarize(i, 0.90)).collect();
    out.rhat_variance = (0..out.names.len())
        .filter(|&i| out.names[i].starts_with("h2_"))
        .map(|i| split_rhat(&out.column(i)))
        .collect();
    Ok(out)
}
