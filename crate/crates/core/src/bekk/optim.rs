//! Quasi-Newton minimisation with BFGS inverse-Hessian updates and a
//! backtracking Armijo line search.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BfgsConfig {
    pub max_iter: usize,
    /// Stop when max |g_i| falls below this.
    pub grad_tol: f64,
    /// Stop when the relative decrease of f in one iteration falls below this.
    pub f_tol: f64,
    pub max_backtracks: usize,
}

impl Default for BfgsConfig {
    fn default() -> Self {
        BfgsConfig { max_iter: 1000, grad_tol: 1e-7, f_tol: 1e-14, max_backtracks: 60 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BfgsResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub grad: Vec<f64>,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    pub message: String,
}

impl BfgsResult {
    pub fn grad_norm(&self) -> f64 {
        self.grad.iter().fold(0.0_f64, |m, g| m.max(g.abs()))
    }
}

/// Minimises `f`, which returns the value and gradient or `None` where the
/// point is inadmissible (treated as +inf, so the line search backs off).
/// `x0` must be admissible.
pub fn bfgs<F>(mut f: F, x0: &[f64], cfg: &BfgsConfig) -> Option<BfgsResult>
where
    F: FnMut(&[f64]) -> Option<(f64, Vec<f64>)>,
{
    let n = x0.len();
    let mut x = DVector::from_column_slice(x0);
    let (mut fx, g0) = f(x0)?;
    let mut g = DVector::from_vec(g0);
    let mut hinv = DMatrix::<f64>::identity(n, n);
    let mut evaluations = 1;
    let mut first = true;
    let max_abs = |v: &DVector<f64>| v.iter().fold(0.0_f64, |m, a| m.max(a.abs()));
    let finish = |x: DVector<f64>, fx, g: DVector<f64>, it, ev, converged, msg: &str| BfgsResult {
        x: x.as_slice().to_vec(),
        f: fx,
        grad: g.as_slice().to_vec(),
        iterations: it,
        evaluations: ev,
        converged,
        message: msg.to_string(),
    };

    for it in 0..cfg.max_iter {
        if max_abs(&g) < cfg.grad_tol {
            return Some(finish(x, fx, g, it, evaluations, true, "gradient tolerance reached"));
        }
        let mut dir = -(&hinv * &g);
        let mut slope = dir.dot(&g);
        if !(slope < 0.0) {
            hinv = DMatrix::identity(n, n);
            dir = -g.clone();
            slope = dir.dot(&g);
        }
        let mut step = if first { (1.0 / max_abs(&g)).min(1.0) } else { 1.0 };
        let mut accepted = None;
        for _ in 0..cfg.max_backtracks {
            let xn = &x + &dir * step;
            evaluations += 1;
            if let Some((fnew, gnew)) = f(xn.as_slice()) {
                if fnew.is_finite() && fnew <= fx + 1e-4 * step * slope {
                    accepted = Some((xn, fnew, DVector::from_vec(gnew)));
                    break;
                }
            }
            step *= 0.5;
        }
        let Some((xn, fnew, gnew)) = accepted else {
            let ok = max_abs(&g) < cfg.grad_tol.sqrt();
            return Some(finish(x, fx, g, it, evaluations, ok, "line search failed"));
        };
        let s = &xn - &x;
        let y = &gnew - &g;
        let sy = s.dot(&y);
        if sy > 1e-12 * s.norm() * y.norm() {
            if first {
                hinv *= sy / y.dot(&y);
            }
            let rho = 1.0 / sy;
            let hy = &hinv * &y;
            let yhy = y.dot(&hy);
            hinv += (&s * s.transpose()) * (rho * rho * yhy + rho) - (&hy * s.transpose() + &s * hy.transpose()) * rho;
            first = false;
        }
        let rel = (fx - fnew).abs() / fx.abs().max(1.0);
        x = xn;
        fx = fnew;
        g = gnew;
        if rel < cfg.f_tol {
            let ok = max_abs(&g) < cfg.grad_tol.sqrt();
            return Some(finish(x, fx, g, it + 1, evaluations, ok, "function tolerance reached"));
        }
    }
    let ok = max_abs(&g) < cfg.grad_tol;
    Some(finish(x, fx, g, cfg.max_iter, evaluations, ok, "iteration limit"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> Option<(f64, Vec<f64>)> {
        let (a, b) = (x[0], x[1]);
        let f = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
        let g = vec![-2.0 * (1.0 - a) - 400.0 * a * (b - a * a), 200.0 * (b - a * a)];
        Some((f, g))
    }

    #[test]
    fn minimises_rosenbrock() {
        let r = bfgs(rosenbrock, &[-1.2, 1.0], &BfgsConfig::default()).unwrap();
        assert!(r.converged, "{}", r.message);
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn starting_at_the_optimum_stops_immediately() {
        let r = bfgs(rosenbrock, &[1.0, 1.0], &BfgsConfig::default()).unwrap();
        assert_eq!(r.iterations, 0);
        assert!(r.converged);
    }

    #[test]
    fn respects_inadmissible_region() {
        // minimum of (x-2)^2 restricted to x < 1.5
        let f = |x: &[f64]| if x[0] < 1.5 { Some(((x[0] - 2.0).powi(2), vec![2.0 * (x[0] - 2.0)])) } else { None };
        let r = bfgs(f, &[0.0], &BfgsConfig { max_iter: 200, ..Default::default() }).unwrap();
        assert!(r.x[0] < 1.5 && r.x[0] > 1.4);
    }
}
