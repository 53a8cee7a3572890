//! Open-loop threshold autoregressive (TAR) processes and the leverage effect.
//!
//! The crate is organised around five areas:
//!
//! - [`tar`]: model definition, stationarity, simulation and the closed-form
//!   conditional and unconditional moments (mean, variance, skewness,
//!   kurtosis, autocovariance).
//! - [`inference`]: conditional likelihood, a threshold nonlinearity test,
//!   NAIC structure identification, Gibbs sampling of the regime
//!   coefficients and pseudo-residual diagnostics (ACF/PACF, CUSUM,
//!   CUSUMSQ).
//! - [`leverage`]: the past-data (Type III) conditional variance, the news
//!   impact curve it induces, its analytic minimiser and the
//!   volatility-elasticity regression.
//! - [`bekk`]: a bivariate VAR(p)-A-BEKK(1,1) baseline with maximum
//!   likelihood estimation, news impact surfaces and asymmetry tests.
//! - [`io`]: price ingestion, experiment orchestration and file output.
//!
//! Runnable walkthroughs of every capability live in the crate's
//! `examples/` directory (`cargo run -p tarlev --example <name>`).

pub mod bekk;
pub mod error;
pub mod inference;
pub mod io;
pub mod leverage;
pub mod ols;
pub mod stats;
pub mod tar;

pub use error::{Error, Result};
