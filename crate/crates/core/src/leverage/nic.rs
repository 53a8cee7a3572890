use serde::Serialize;

use crate::error::{Error, Result};
use crate::tar::moments::type3;
use crate::tar::{RegimeProbs, TarSpec};

/// Denominator floor below which the minimiser is reported as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-14;

/// Var(X_t | past) for the given lags (most recent first):
/// sum p_j h_j^2 + sum p_j m_j^2 - (sum p_j m_j)^2, m_j = a_0^(j) + sum_i a_i^(j) x_{t-i}.
pub fn conditional_variance_type3(spec: &TarSpec, probs: &RegimeProbs, lags: &[f64]) -> Result<f64> {
    if probs.l() != spec.l() {
        return Err(Error::InvalidInput("probability vector does not match the regimes".into()));
    }
    Ok(type3(spec, &probs.marginal, lags)?.variance)
}

/// Weighted sums shared by the curve, its derivatives and the minimiser.
struct Sums {
    /// sum p h^2
    noise: f64,
    /// sum p a0
    a0: f64,
    /// sum p S
    s: f64,
    /// sum p a0^2
    a0a0: f64,
    /// sum p a0 S
    a0s: f64,
    /// sum p S^2
    ss: f64,
}

fn sums(spec: &TarSpec, p: &[f64]) -> Sums {
    let mut out = Sums { noise: 0.0, a0: 0.0, s: 0.0, a0a0: 0.0, a0s: 0.0, ss: 0.0 };
    for (r, &pj) in spec.regimes().iter().zip(p) {
        let s = r.ar_sum();
        let a0 = r.intercept;
        out.noise += pj * r.h * r.h;
        out.a0 += pj * a0;
        out.s += pj * s;
        out.a0a0 += pj * a0 * a0;
        out.a0s += pj * a0 * s;
        out.ss += pj * s * s;
    }
    out
}

/// Type III variance when every lag equals `x` (the squared news impact curve).
pub fn nic_variance(spec: &TarSpec, probs: &RegimeProbs, x: f64) -> f64 {
    let s = sums(spec, &probs.marginal);
    let mut second = 0.0;
    let mut mean = 0.0;
    for (r, &pj) in spec.regimes().iter().zip(&probs.marginal) {
        let m = r.intercept + r.ar_sum() * x;
        second += pj * m * m;
        mean += pj * m;
    }
    s.noise + second - mean * mean
}

/// d Var / d x for the common-lag curve.
pub fn nic_variance_derivative(spec: &TarSpec, probs: &RegimeProbs, x: f64) -> f64 {
    let s = sums(spec, &probs.marginal);
    2.0 * s.a0s + 2.0 * s.ss * x - 2.0 * s.a0 * s.s - 2.0 * s.s * s.s * x
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct XStarMin {
    /// NaN when degenerate.
    pub value: f64,
    pub denominator: f64,
    pub degenerate: bool,
}

/// Closed-form stationary point of the common-lag variance,
/// x* = [(sum p a0)(sum p S) - sum p a0 S] / [sum p S^2 - (sum p S)^2].
pub fn x_star_min(spec: &TarSpec, probs: &RegimeProbs) -> XStarMin {
    let s = sums(spec, &probs.marginal);
    let denominator = s.ss - s.s * s.s;
    if denominator < DEGENERACY_TOL {
        return XStarMin { value: f64::NAN, denominator, degenerate: true };
    }
    XStarMin { value: (s.a0 * s.s - s.a0s) / denominator, denominator, degenerate: false }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Convexity {
    /// Constant in x: 2 [sum p S^2 - (sum p S)^2].
    pub second_derivative: f64,
    /// sum_i sum_j p_i p_j S_i S_j <= 0, a sufficient (not necessary) condition.
    pub sufficient_condition_holds: bool,
    pub convex: bool,
}

pub fn convexity_check(spec: &TarSpec, probs: &RegimeProbs) -> Convexity {
    let s = sums(spec, &probs.marginal);
    let second_derivative = 2.0 * (s.ss - s.s * s.s);
    let sj: Vec<f64> = spec.regimes().iter().map(|r| r.ar_sum()).collect();
    let p = &probs.marginal;
    let mut cross = 0.0;
    for i in 0..sj.len() {
        for j in 0..sj.len() {
            cross += p[i] * p[j] * sj[i] * sj[j];
        }
    }
    Convexity {
        second_derivative,
        sufficient_condition_holds: cross <= 0.0,
        convex: second_derivative > 0.0,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NicCurve {
    pub grid: Vec<f64>,
    pub volatility: Vec<f64>,
    pub x_star_min: f64,
    pub degenerate: bool,
    pub convex: bool,
    pub sufficient_condition: bool,
    /// x_star_min > 0 on a convex, non-degenerate curve.
    pub leverage_detected: bool,
}

/// 401 points on [-0.10, 0.10].
pub fn default_grid() -> Vec<f64> {
    (0..401).map(|i| -0.10 + 0.0005 * i as f64).collect()
}

/// Volatility sqrt(Var(X_t | x_{t-1} = ... = x_{t-k} = x)) over `grid`.
pub fn nic_curve(spec: &TarSpec, probs: &RegimeProbs, grid: &[f64]) -> Result<NicCurve> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("news impact grid is empty".into()));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidInput("news impact grid must be strictly increasing".into()));
    }
    if probs.l() != spec.l() {
        return Err(Error::InvalidInput("probability vector does not match the regimes".into()));
    }
    let volatility = grid.iter().map(|&x| nic_variance(spec, probs, x).max(0.0).sqrt()).collect();
    let xm = x_star_min(spec, probs);
    let cv = convexity_check(spec, probs);
    Ok(NicCurve {
        grid: grid.to_vec(),
        volatility,
        x_star_min: xm.value,
        degenerate: xm.degenerate,
        convex: cv.convex,
        sufficient_condition: cv.sufficient_condition_holds,
        leverage_detected: !xm.degenerate && cv.convex && xm.value > 0.0,
    })
}

/// Type III volatility along an observed path: entry t - k holds
/// sqrt(Var(X_t | x_{t-1}, ..., x_{t-k})) for t = k..x.len()-1.
pub fn volatility_path(spec: &TarSpec, probs: &RegimeProbs, x: &[f64]) -> Result<Vec<f64>> {
    let k = spec.max_order();
    if x.len() <= k {
        return Err(Error::InsufficientData(format!("{} observations for order {k}", x.len())));
    }
    let mut lags = vec![0.0; k];
    (k..x.len())
        .map(|t| {
            for i in 0..k {
                lags[i] = x[t - 1 - i];
            }
            Ok(conditional_variance_type3(spec, probs, &lags)?.sqrt())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tar::presets::bovespa;
    use crate::tar::Regime;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bovespa_minimum_and_curvature() {
        let m = bovespa();
        let xm = x_star_min(&m.spec, &m.probs);
        assert!(!xm.degenerate);
        assert_abs_diff_eq!(xm.value, 0.039077, epsilon = 1e-6);
        let c = convexity_check(&m.spec, &m.probs);
        assert_abs_diff_eq!(c.second_derivative, 2.0 * 0.02436721, epsilon = 1e-9);
        assert!(c.convex);
    }

    #[test]
    fn single_regime_is_flat_and_degenerate() {
        let spec = TarSpec::linear(Regime::new(0.1, vec![0.3, 0.2], 0.5)).unwrap();
        let p = RegimeProbs::uniform(1);
        assert!(x_star_min(&spec, &p).degenerate);
        let c = convexity_check(&spec, &p);
        assert_eq!(c.second_derivative, 0.0);
        assert!(!c.convex);
        for x in [-1.0, 0.0, 2.0] {
            assert_abs_diff_eq!(conditional_variance_type3(&spec, &p, &[x, x]).unwrap(), 0.25, epsilon = 1e-15);
        }
    }

    #[test]
    fn zero_ar_sums_give_a_flat_curve() {
        let spec = TarSpec::new(
            vec![0.0],
            vec![Regime::new(-0.01, vec![0.2, -0.2], 0.01), Regime::new(0.02, vec![], 0.02)],
        )
        .unwrap();
        let p = RegimeProbs::uniform(2);
        let curve = nic_curve(&spec, &p, &default_grid()).unwrap();
        let flat = (0.5 * (1e-4 + 4e-4) + 0.25 * 0.03f64.powi(2)).sqrt();
        for v in &curve.volatility {
            assert_abs_diff_eq!(*v, flat, epsilon = 1e-15);
        }
        assert!(curve.degenerate && !curve.leverage_detected);
    }

    #[test]
    fn derivative_vanishes_at_minimum() {
        let m = bovespa();
        let xm = x_star_min(&m.spec, &m.probs).value;
        assert!(nic_variance_derivative(&m.spec, &m.probs, xm).abs() < 1e-16);
    }

    #[test]
    fn grid_must_increase() {
        let m = bovespa();
        assert!(nic_curve(&m.spec, &m.probs, &[]).is_err());
        assert!(nic_curve(&m.spec, &m.probs, &[0.1, 0.0]).is_err());
    }
}
