//! Leverage effect in TAR models: the past-data (type III) conditional
//! variance, the news impact curve it implies, its analytic minimiser and
//! convexity, and the volatility-elasticity regression.

pub mod elasticity;
pub mod nic;

pub use elasticity::{leverage_elasticity, ElasticityFit};
pub use nic::{
    conditional_variance_type3, convexity_check, default_grid, nic_curve, nic_variance, nic_variance_derivative,
    volatility_path, x_star_min, Convexity, NicCurve, XStarMin, DEGENERACY_TOL,
};
