//! Bivariate VAR(p)-A-BEKK(1,1): filtering, likelihood, maximum-likelihood
//! fitting, news impact surfaces and asymmetry diagnostics.

pub mod asymmetry;
pub mod filter;
pub mod fit;
pub mod nis;
pub mod optim;
pub mod params;
pub mod simulate;

pub use asymmetry::{asymmetry_tests, leverage_test, sign_bias_test, AsymmetryReport, FTestResult, DEFAULT_ENDERS_LAGS};
pub use filter::{bekk_filter, bekk_log_likelihood, log_likelihood_gradient, next_covariance, sample_h0, var_ols, FilterOutput};
pub use fit::{fit_bekk, BekkFit, FitBlock, FitConfig, FitEntry};
pub use nis::{nis_equations, nis_point, nis_slice, nis_surface, NisCoefficients, NisEquations, NisPoint};
pub use optim::{bfgs, BfgsConfig, BfgsResult};
pub use params::{bovespa_bekk, BekkParams, Mat2, BOVESPA_BEKK_JSON};
pub use simulate::{simulate_bekk, BekkPath};
