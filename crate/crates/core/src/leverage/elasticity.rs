use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::ols::ols;

/// ln(sigma_t / sigma_{t-1}) = alpha0 + alpha1 r_{t-1} + e_t, fitted by OLS.
#[derive(Debug, Clone, Serialize)]
pub struct ElasticityFit {
    pub alpha0: f64,
    pub alpha1: f64,
    /// Classical t statistics. An exact fit has zero residual variance, so a
    /// non-zero coefficient then gets an infinite t statistic.
    pub t_alpha0: f64,
    pub t_alpha1: f64,
    pub p_alpha1: f64,
    pub residual_sd: f64,
    /// Number of regression observations (series length minus one).
    pub n: usize,
}

impl ElasticityFit {
    /// alpha1 negative and significant at `level` (two-sided).
    pub fn leverage_indicated(&self, level: f64) -> bool {
        self.alpha1 < 0.0 && self.p_alpha1 < level
    }
}

fn t_stat(coef: f64, se: f64) -> f64 {
    if se > 0.0 {
        coef / se
    } else if coef == 0.0 {
        0.0
    } else {
        coef.signum() * f64::INFINITY
    }
}

/// `volatility[t]` and `returns[t]` refer to the same date.
pub fn leverage_elasticity(volatility: &[f64], returns: &[f64]) -> Result<ElasticityFit> {
    if volatility.len() != returns.len() {
        return Err(Error::InvalidInput(format!(
            "volatility has {} points, returns {}",
            volatility.len(),
            returns.len()
        )));
    }
    if volatility.len() < 10 {
        return Err(Error::InsufficientData("elasticity regression needs at least 10 points".into()));
    }
    if let Some(i) = volatility.iter().position(|s| !(*s > 0.0) || !s.is_finite()) {
        return Err(Error::NonPositiveVolatility(i));
    }
    let n = volatility.len() - 1;
    let reg = &returns[..n];
    let mean_r = reg.iter().sum::<f64>() / n as f64;
    if reg.iter().all(|r| (r - mean_r).abs() == 0.0) {
        return Err(Error::DegenerateRegressor);
    }
    let y = DVector::from_fn(n, |t, _| (volatility[t + 1] / volatility[t]).ln());
    let x = DMatrix::from_fn(n, 2, |t, j| if j == 0 { 1.0 } else { reg[t] });
    let fit = ols(&x, &y).map_err(|e| match e {
        Error::SingularDesign(_) => Error::DegenerateRegressor,
        other => other,
    })?;
    let t0 = t_stat(fit.coef[0], fit.se[0]);
    let t1 = t_stat(fit.coef[1], fit.se[1]);
    let df = (n - 2) as f64;
    let p1 = if t1.is_finite() {
        let t = StudentsT::new(0.0, 1.0, df).expect("df > 0");
        2.0 * t.sf(t1.abs())
    } else if t1 == 0.0 {
        1.0
    } else {
        0.0
    };
    Ok(ElasticityFit {
        alpha0: fit.coef[0],
        alpha1: fit.coef[1],
        t_alpha0: t0,
        t_alpha1: t1,
        p_alpha1: p1,
        residual_sd: fit.sigma2.sqrt(),
        n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn returns(n: usize) -> Vec<f64> {
        (0..n).map(|i| 0.01 * ((i * 37 % 11) as f64 - 5.0)).collect()
    }

    #[test]
    fn constant_volatility_gives_zero_coefficients() {
        let r = returns(50);
        let fit = leverage_elasticity(&vec![0.02; 50], &r).unwrap();
        assert_eq!(fit.alpha0, 0.0);
        assert_eq!(fit.alpha1, 0.0);
        assert_eq!(fit.t_alpha1, 0.0);
    }

    #[test]
    fn exact_log_linear_response_is_recovered() {
        let r = returns(60);
        let mut s = vec![0.01];
        for t in 1..60 {
            let prev = s[t - 1];
            s.push((0.001 - 0.8 * r[t - 1]).exp() * prev);
        }
        let fit = leverage_elasticity(&s, &r).unwrap();
        assert_abs_diff_eq!(fit.alpha1, -0.8, epsilon = 1e-10);
        assert_abs_diff_eq!(fit.alpha0, 0.001, epsilon = 1e-10);
    }

    #[test]
    fn input_errors() {
        let r = returns(20);
        let mut s = vec![0.01; 20];
        s[3] = 0.0;
        assert!(matches!(leverage_elasticity(&s, &r), Err(Error::NonPositiveVolatility(3))));
        assert!(matches!(
            leverage_elasticity(&vec![0.01; 20], &vec![0.5; 20]),
            Err(Error::DegenerateRegressor)
        ));
    }
}
