use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One regime: X_t = intercept + sum_i ar[i-1] X_{t-i} + h e_t.
///
/// `h` multiplies a standard normal innovation, so it is the regime's noise
/// standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    pub intercept: f64,
    #[serde(default)]
    pub ar: Vec<f64>,
    pub h: f64,
}

impl Regime {
    pub fn new(intercept: f64, ar: Vec<f64>, h: f64) -> Self {
        Regime { intercept, ar, h }
    }

    pub fn order(&self) -> usize {
        self.ar.len()
    }

    /// Sum of the AR coefficients.
    pub fn ar_sum(&self) -> f64 {
        self.ar.iter().sum()
    }

    /// phi(1) = 1 - sum a_i
    pub fn phi_at_one(&self) -> f64 {
        1.0 - self.ar_sum()
    }

    /// Conditional mean given the lags, most recent first.
    pub fn predict(&self, lags: &[f64]) -> f64 {
        self.intercept + self.ar.iter().zip(lags).map(|(a, x)| a * x).sum::<f64>()
    }
}

/// A validated TAR(l; k_1, ..., k_l) parameterization.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TarSpec {
    thresholds: Vec<f64>,
    regimes: Vec<Regime>,
}

impl TarSpec {
    /// `thresholds` must be strictly increasing with one fewer entry than
    /// `regimes`. Noise weights must be finite and non-negative; zero is
    /// accepted for noiseless experiments.
    pub fn new(thresholds: Vec<f64>, regimes: Vec<Regime>) -> Result<Self> {
        if regimes.is_empty() {
            return Err(Error::InvalidSpec("at least one regime is required".into()));
        }
        if thresholds.len() + 1 != regimes.len() {
            return Err(Error::InvalidSpec(format!(
                "{} regimes need {} thresholds, got {}",
                regimes.len(),
                regimes.len() - 1,
                thresholds.len()
            )));
        }
        if thresholds.iter().any(|r| !r.is_finite()) {
            return Err(Error::InvalidSpec("thresholds must be finite".into()));
        }
        if thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSpec("thresholds must be strictly increasing".into()));
        }
        for (j, r) in regimes.iter().enumerate() {
            if !r.intercept.is_finite() || r.ar.iter().any(|a| !a.is_finite()) {
                return Err(Error::InvalidSpec(format!("regime {j} has non-finite coefficients")));
            }
            if !(r.h >= 0.0) || !r.h.is_finite() {
                return Err(Error::InvalidSpec(format!("regime {j} noise weight must be >= 0")));
            }
        }
        Ok(TarSpec { thresholds, regimes })
    }

    /// Single-regime (linear AR) model.
    pub fn linear(regime: Regime) -> Result<Self> {
        Self::new(Vec::new(), vec![regime])
    }

    pub fn l(&self) -> usize {
        self.regimes.len()
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn regimes(&self) -> &[Regime] {
        &self.regimes
    }

    pub fn regime(&self, j: usize) -> &Regime {
        &self.regimes[j]
    }

    pub fn orders(&self) -> Vec<usize> {
        self.regimes.iter().map(Regime::order).collect()
    }

    /// k = max_j k_j
    pub fn max_order(&self) -> usize {
        self.regimes.iter().map(Regime::order).max().unwrap_or(0)
    }

    /// Index of the regime whose interval (r_{j-1}, r_j] contains `z`.
    pub fn regime_of(&self, z: f64) -> usize {
        regime_index(&self.thresholds, z)
    }

    pub fn regime_path(&self, z: &[f64]) -> Vec<usize> {
        z.iter().map(|&v| self.regime_of(v)).collect()
    }

    /// Same model with every noise weight replaced.
    pub fn with_noise(&self, h: &[f64]) -> Result<Self> {
        let regimes = self
            .regimes
            .iter()
            .zip(h)
            .map(|(r, &h)| Regime { h, ..r.clone() })
            .collect();
        Self::new(self.thresholds.clone(), regimes)
    }
}

/// Half-open interval lookup: values equal to a threshold belong to the
/// lower regime.
pub fn regime_index(thresholds: &[f64], z: f64) -> usize {
    thresholds.partition_point(|&r| r < z)
}

/// The exogenous threshold process {Z_t}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ZProcessSpec {
    /// Z_t - m = phi (Z_{t-1} - m) + sqrt(tau_var) eta_t.
    GaussianAr1 {
        phi: f64,
        tau_var: f64,
        #[serde(default)]
        mean: f64,
    },
    Observed { series: Vec<f64> },
}

impl ZProcessSpec {
    pub fn gaussian_ar1(phi: f64, tau_var: f64) -> Result<Self> {
        let z = ZProcessSpec::GaussianAr1 { phi, tau_var, mean: 0.0 };
        z.validate()?;
        Ok(z)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ZProcessSpec::GaussianAr1 { phi, tau_var, mean } => {
                if !(phi.abs() < 1.0) {
                    return Err(Error::InvalidSpec(format!("|phi| must be < 1, got {phi}")));
                }
                if !(*tau_var > 0.0) || !tau_var.is_finite() || !mean.is_finite() {
                    return Err(Error::InvalidSpec("tau_var must be positive and finite".into()));
                }
                Ok(())
            }
            ZProcessSpec::Observed { series } => {
                if series.is_empty() {
                    return Err(Error::InvalidSpec("observed Z series is empty".into()));
                }
                if series.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidSpec("observed Z series has non-finite values".into()));
                }
                Ok(())
            }
        }
    }

    /// Stationary standard deviation of a Gaussian AR(1).
    pub fn stationary_sd(&self) -> Option<f64> {
        match self {
            ZProcessSpec::GaussianAr1 { phi, tau_var, .. } => Some((tau_var / (1.0 - phi * phi)).sqrt()),
            ZProcessSpec::Observed { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegimeDocument {
    pub order: usize,
    pub intercept: f64,
    #[serde(default)]
    pub ar: Vec<f64>,
    pub h: f64,
}

/// JSON form of a model: `{l, thresholds, regimes: [{order, intercept, ar, h}], z}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub l: usize,
    #[serde(default)]
    pub thresholds: Vec<f64>,
    pub regimes: Vec<RegimeDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<ZProcessSpec>,
    /// Regime probabilities to use instead of those implied by `z`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probabilities: Option<Vec<f64>>,
}

impl ModelDocument {
    pub fn from_spec(spec: &TarSpec, z: Option<ZProcessSpec>) -> Self {
        ModelDocument {
            description: None,
            l: spec.l(),
            thresholds: spec.thresholds().to_vec(),
            regimes: spec
                .regimes()
                .iter()
                .map(|r| RegimeDocument { order: r.order(), intercept: r.intercept, ar: r.ar.clone(), h: r.h })
                .collect(),
            z,
            probabilities: None,
        }
    }

    pub fn to_spec(&self) -> Result<TarSpec> {
        if self.l != self.regimes.len() {
            return Err(Error::InvalidSpec(format!(
                "l = {} but {} regimes listed",
                self.l,
                self.regimes.len()
            )));
        }
        let mut regimes = Vec::with_capacity(self.l);
        for (j, r) in self.regimes.iter().enumerate() {
            if r.order != r.ar.len() {
                return Err(Error::InvalidSpec(format!(
                    "regime {j}: order {} but {} AR coefficients",
                    r.order,
                    r.ar.len()
                )));
            }
            regimes.push(Regime::new(r.intercept, r.ar.clone(), r.h));
        }
        if let Some(z) = &self.z {
            z.validate()?;
        }
        TarSpec::new(self.thresholds.clone(), regimes)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_regime() -> TarSpec {
        TarSpec::new(
            vec![0.0],
            vec![Regime::new(0.6, vec![], 0.7), Regime::new(0.2, vec![0.4], 1.1)],
        )
        .unwrap()
    }

    #[test]
    fn threshold_value_belongs_to_lower_regime() {
        let s = two_regime();
        assert_eq!(s.regime_of(-1.0), 0);
        assert_eq!(s.regime_of(0.0), 0);
        assert_eq!(s.regime_of(1e-300), 1);
    }

    #[test]
    fn rejects_bad_structure() {
        let r = || Regime::new(0.0, vec![], 1.0);
        assert!(TarSpec::new(vec![], vec![]).is_err());
        assert!(TarSpec::new(vec![1.0, 0.0], vec![r(), r(), r()]).is_err());
        assert!(TarSpec::new(vec![0.0, 0.0], vec![r(), r(), r()]).is_err());
        assert!(TarSpec::new(vec![], vec![r(), r()]).is_err());
        assert!(TarSpec::new(vec![], vec![Regime::new(0.0, vec![], -1.0)]).is_err());
    }

    #[test]
    fn document_round_trip() {
        let s = two_regime();
        let doc = ModelDocument::from_spec(&s, Some(ZProcessSpec::gaussian_ar1(0.5, 1.0).unwrap()));
        let text = doc.to_json().unwrap();
        let back = ModelDocument::from_json(&text).unwrap();
        assert_eq!(back.to_spec().unwrap(), s);
        assert_eq!(back.z, doc.z);
        assert!(text.contains("\"kind\": \"gaussian_ar1\""));
    }

    #[test]
    fn document_checks_declared_order() {
        let text = r#"{"l":1,"regimes":[{"order":2,"intercept":0,"ar":[0.1],"h":1}]}"#;
        let doc = ModelDocument::from_json(text).unwrap();
        assert!(matches!(doc.to_spec(), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn z_process_validation() {
        assert!(ZProcessSpec::gaussian_ar1(1.0, 1.0).is_err());
        assert!(ZProcessSpec::gaussian_ar1(0.5, 0.0).is_err());
        assert!(ZProcessSpec::Observed { series: vec![] }.validate().is_err());
    }
}
