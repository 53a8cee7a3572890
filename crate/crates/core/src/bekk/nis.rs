//! News impact surfaces: the one-step covariance as a function of the
//! previous shock pair, with the previous covariance fixed at its mean.

use nalgebra::{Matrix2, Vector2};
use serde::Serialize;

use super::filter::next_covariance;
use super::params::{to_m, BekkParams, Mat2};

/// Coefficients of one entry of H_t written as a polynomial in the lagged
/// shocks, the lagged covariance entries and the negative-part shocks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NisCoefficients {
    pub constant: f64,
    pub a1_sq: f64,
    pub a1_a2: f64,
    pub a2_sq: f64,
    pub h11: f64,
    /// Multiplies the (shared) off-diagonal covariance.
    pub h12: f64,
    pub h22: f64,
    pub z1_sq: f64,
    pub z1_z2: f64,
    pub z2_sq: f64,
}

impl NisCoefficients {
    /// Entry (r, c) of C'C + lambda'aa'lambda + theta'H theta + D'zz'D.
    pub fn entry(params: &BekkParams, r: usize, c: usize) -> Self {
        let quad = |m: &Mat2| (m[0][r] * m[0][c], m[0][r] * m[1][c] + m[1][r] * m[0][c], m[1][r] * m[1][c]);
        let (a1_sq, a1_a2, a2_sq) = quad(&params.lambda);
        let (h11, h12, h22) = quad(&params.theta);
        let (z1_sq, z1_z2, z2_sq) = quad(&params.d);
        NisCoefficients {
            constant: params.intercept_cov()[(r, c)],
            a1_sq,
            a1_a2,
            a2_sq,
            h11,
            h12,
            h22,
            z1_sq,
            z1_z2,
            z2_sq,
        }
    }

    pub fn evaluate(&self, a1: f64, a2: f64, hbar: &Mat2) -> f64 {
        let (z1, z2) = (a1.min(0.0), a2.min(0.0));
        self.constant
            + self.a1_sq * a1 * a1
            + self.a1_a2 * a1 * a2
            + self.a2_sq * a2 * a2
            + self.h11 * hbar[0][0]
            + self.h12 * hbar[0][1]
            + self.h22 * hbar[1][1]
            + self.z1_sq * z1 * z1
            + self.z1_z2 * z1 * z2
            + self.z2_sq * z2 * z2
    }
}

/// Coefficients of sigma_11, sigma_22 and sigma_12.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NisEquations {
    pub sigma11: NisCoefficients,
    pub sigma22: NisCoefficients,
    pub sigma12: NisCoefficients,
}

pub fn nis_equations(params: &BekkParams) -> NisEquations {
    NisEquations {
        sigma11: NisCoefficients::entry(params, 0, 0),
        sigma22: NisCoefficients::entry(params, 1, 1),
        sigma12: NisCoefficients::entry(params, 0, 1),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NisPoint {
    pub a1: f64,
    pub a2: f64,
    pub sigma11: f64,
    pub sigma22: f64,
    pub sigma12: f64,
}

pub fn nis_point(params: &BekkParams, hbar: &Mat2, a1: f64, a2: f64) -> NisPoint {
    let h: Matrix2<f64> = next_covariance(params, &Vector2::new(a1, a2), &to_m(hbar));
    NisPoint { a1, a2, sigma11: h[(0, 0)], sigma22: h[(1, 1)], sigma12: h[(0, 1)] }
}

/// Full surface over the product grid, a1 varying slowest.
pub fn nis_surface(params: &BekkParams, hbar: &Mat2, grid1: &[f64], grid2: &[f64]) -> Vec<NisPoint> {
    grid1
        .iter()
        .flat_map(|&a1| grid2.iter().map(move |&a2| nis_point(params, hbar, a1, a2)))
        .collect()
}

/// One-dimensional slice with a2 held fixed (typically at its mean).
pub fn nis_slice(params: &BekkParams, hbar: &Mat2, a2: f64, grid: &[f64]) -> Vec<NisPoint> {
    grid.iter().map(|&a1| nis_point(params, hbar, a1, a2)).collect()
}
