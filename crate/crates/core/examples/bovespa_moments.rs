//! Unconditional and conditional moments of the Bovespa TAR(2;0,6) preset.

use tarlev::tar::presets::bovespa;
use tarlev::tar::{conditional_moments, unconditional_moments};

fn main() -> tarlev::Result<()> {
    let m = bovespa();
    let s = unconditional_moments(&m.spec, &m.probs)?;
    println!("mean {:.6}  variance {:.6e}  skewness {:.4}  kurtosis {:.4}", s.mean, s.variance, s.skewness, s.kurtosis);
    for (j, r) in s.per_regime.iter().enumerate() {
        println!(
            "regime {}: mu1 {:.6}  mu2 {:.6e}  psi(1) {:.4}  sigma-bar^2 {:.4}",
            j + 1,
            r.mu1,
            r.mu2,
            r.psi_sum,
            r.sigma_bar_sq
        );
    }

    // a calm and a falling market over the last six days
    for lags in [[0.0; 6], [-0.03, -0.02, -0.01, 0.0, 0.0, 0.0]] {
        let c = conditional_moments(&m.spec, &m.probs, Some(&lags))?;
        let t3 = c.type3.expect("lags given");
        println!("past {lags:?}: E = {:.6}, Var = {:.6e}", t3.mean, t3.variance);
        for (j, t2) in c.type2.expect("lags given").iter().enumerate() {
            println!("  given regime {}: E = {:.6}, Var = {:.6e}", j + 1, t2.mean, t2.variance);
        }
    }
    Ok(())
}
