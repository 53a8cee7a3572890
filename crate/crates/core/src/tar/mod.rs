//! The open-loop TAR(l; k_1, ..., k_l) process.
//!
//! X_t = a_0^(j) + sum_i a_i^(j) X_{t-i} + h^(j) e_t whenever the exogenous
//! threshold variable Z_t falls in B_j = (r_{j-1}, r_j].

pub mod bvn;
pub mod moments;
pub mod presets;
pub mod probs;
pub mod psi;
pub mod simulate;
pub mod spec;
pub mod stationarity;

pub use moments::{
    autocovariance, autocovariance_with_probs, conditional_moments, unconditional_moments,
    ConditionalMoments, MeanVar, MomentSummary, RegimeMoments,
};
pub use probs::{regime_probabilities, RegimeProbs};
pub use psi::{compute_psi_weights, PsiWeights, DEFAULT_PSI_TOL};
pub use simulate::{replicate_moments, simulate_tar, ReplicationSummary, TarPath};
pub use spec::{ModelDocument, Regime, TarSpec, ZProcessSpec};
pub use stationarity::{check_stationarity, RegimeStationarity};
