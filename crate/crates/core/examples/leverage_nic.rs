//! News impact curve of the Bovespa preset, its analytic minimiser and the
//! volatility-elasticity regression on a simulated path.

use tarlev::leverage::{convexity_check, default_grid, leverage_elasticity, nic_curve, volatility_path, x_star_min};
use tarlev::tar::presets::bovespa;
use tarlev::tar::simulate_tar;

fn main() -> tarlev::Result<()> {
    let m = bovespa();
    let xm = x_star_min(&m.spec, &m.probs);
    let cv = convexity_check(&m.spec, &m.probs);
    println!("x*_min = {:.5} (second derivative {:.4e}, convex: {})", xm.value, cv.second_derivative, cv.convex);

    let curve = nic_curve(&m.spec, &m.probs, &default_grid())?;
    for (x, v) in curve.grid.iter().zip(&curve.volatility).step_by(50) {
        println!("  x = {x:+.3}  volatility {v:.5}");
    }
    println!("leverage detected: {}", curve.leverage_detected);

    let path = simulate_tar(&m.spec, m.z_process()?, 3000, 500, 5)?;
    let k = m.spec.max_order();
    let vol = volatility_path(&m.spec, &m.probs, &path.x)?;
    let fit = leverage_elasticity(&vol, &path.x[k..])?;
    println!(
        "ln(sigma_t / sigma_t-1) = {:.5} + {:.4} r_t-1   (t = {:.2}, p = {:.3e})",
        fit.alpha0, fit.alpha1, fit.t_alpha1, fit.p_alpha1
    );
    Ok(())
}
