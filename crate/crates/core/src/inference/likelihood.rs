use crate::error::{Error, Result};
use crate::tar::TarSpec;

fn check_inputs(spec: &TarSpec, x: &[f64], regimes: &[usize]) -> Result<usize> {
    if x.len() != regimes.len() {
        return Err(Error::InvalidInput(format!("{} observations but {} regime labels", x.len(), regimes.len())));
    }
    if let Some(j) = regimes.iter().find(|&&j| j >= spec.l()) {
        return Err(Error::InvalidInput(format!("regime label {j} out of range")));
    }
    Ok(spec.max_order())
}

/// Gaussian conditional log-likelihood given the first k = max k_j values:
/// -((T-k)/2) ln 2 pi - sum ln h^(j_t) - 1/2 sum e_t^2.
pub fn conditional_log_likelihood(spec: &TarSpec, x: &[f64], regimes: &[usize]) -> Result<f64> {
    let k = check_inputs(spec, x, regimes)?;
    if x.len() <= k {
        return Err(Error::InsufficientData(format!("{} observations for maximum order {k}", x.len())));
    }
    let mut ll = -0.5 * (x.len() - k) as f64 * (2.0 * std::f64::consts::PI).ln();
    for t in k..x.len() {
        let r = spec.regime(regimes[t]);
        if !(r.h > 0.0) {
            return Err(Error::InvalidSpec(format!("regime {} has zero noise weight", regimes[t])));
        }
        let lags: Vec<f64> = (1..=r.order()).map(|i| x[t - i]).collect();
        let e = (x[t] - r.predict(&lags)) / r.h;
        ll -= r.h.ln() + 0.5 * e * e;
    }
    Ok(ll)
}

/// Standardized one-step prediction errors (x_t - x_{t|t-1}) / h^(j_t) for
/// t = k..T-1, k = max k_j.
pub fn pseudo_residuals(spec: &TarSpec, x: &[f64], regimes: &[usize]) -> Result<Vec<f64>> {
    let k = check_inputs(spec, x, regimes)?;
    if x.len() <= k {
        return Err(Error::InsufficientHistory { needed: k + 1, got: x.len() });
    }
    if let Some(j) = spec.regimes().iter().position(|r| !(r.h > 0.0)) {
        return Err(Error::InvalidSpec(format!("regime {j} has zero noise weight; residuals undefined")));
    }
    Ok((k..x.len())
        .map(|t| {
            let r = spec.regime(regimes[t]);
            let pred = r.intercept + r.ar.iter().enumerate().map(|(i, a)| a * x[t - 1 - i]).sum::<f64>();
            (x[t] - pred) / r.h
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tar::presets::m2;
    use crate::tar::{simulate_tar, Regime};
    use approx::assert_abs_diff_eq;

    #[test]
    fn two_zeros_under_standard_normal() {
        let spec = TarSpec::linear(Regime::new(0.0, vec![], 1.0)).unwrap();
        let ll = conditional_log_likelihood(&spec, &[0.0, 0.0], &[0, 0]).unwrap();
        assert_abs_diff_eq!(ll, -(2.0 * std::f64::consts::PI).ln(), epsilon = 1e-15);
    }

    #[test]
    fn residual_duality() {
        let m = m2();
        let path = simulate_tar(&m.spec, m.z.as_ref().unwrap(), 400, 100, 5).unwrap();
        let ll = conditional_log_likelihood(&m.spec, &path.x, &path.regimes).unwrap();
        let e = pseudo_residuals(&m.spec, &path.x, &path.regimes).unwrap();
        let k = m.spec.max_order();
        let ssq: f64 = e.iter().map(|v| v * v).sum();
        let logh: f64 = path.regimes[k..].iter().map(|&j| m.spec.regime(j).h.ln()).sum();
        let lhs = -2.0 * ll - (path.x.len() - k) as f64 * (2.0 * std::f64::consts::PI).ln();
        assert_abs_diff_eq!(lhs, ssq + 2.0 * logh, epsilon = 1e-9 * lhs.abs());
    }

    #[test]
    fn too_short_series() {
        let spec = TarSpec::linear(Regime::new(0.0, vec![0.5, 0.1], 1.0)).unwrap();
        assert!(matches!(
            conditional_log_likelihood(&spec, &[1.0, 2.0], &[0, 0]),
            Err(Error::InsufficientData(_))
        ));
        assert!(matches!(pseudo_residuals(&spec, &[1.0, 2.0], &[0, 0]), Err(Error::InsufficientHistory { .. })));
    }

    #[test]
    fn zero_noise_is_rejected_for_residuals() {
        let spec = TarSpec::linear(Regime::new(1.0, vec![], 0.0)).unwrap();
        assert!(pseudo_residuals(&spec, &[1.0, 1.0, 1.0], &[0, 0, 0]).is_err());
    }
}
