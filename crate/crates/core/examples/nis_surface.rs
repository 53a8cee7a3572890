//! News impact surface of the Bovespa A-BEKK preset and asymmetry tests on
//! data simulated from it.

use tarlev::bekk::{asymmetry_tests, bekk_filter, bovespa_bekk, nis_equations, nis_slice, simulate_bekk};

fn main() -> tarlev::Result<()> {
    let p = bovespa_bekk();
    let s = nis_equations(&p).sigma11;
    println!(
        "sigma11 = {:.3e} + {:.4} a1^2 + {:.4} a1 a2 + {:.4} a2^2 + {:.4} h11 + {:.4} h12 + {:.1e} h22 + {:.4} z1^2 + {:.4} z1 z2 + {:.4} z2^2",
        s.constant, s.a1_sq, s.a1_a2, s.a2_sq, s.h11, s.h12, s.h22, s.z1_sq, s.z1_z2, s.z2_sq
    );

    let sim = simulate_bekk(&p, 4000, 1000, 2)?;
    let filtered = bekk_filter(&p, &sim.returns, &sim.covariances[0])?;
    let hbar = filtered.mean_covariance();
    let a2bar = sim.returns.iter().map(|r| r[1]).sum::<f64>() / sim.returns.len() as f64;
    let grid: Vec<f64> = (-4..=4).map(|i| 0.025 * i as f64).collect();
    for q in nis_slice(&p, &hbar, a2bar, &grid) {
        println!("  a1 = {:+.3}  volatility {:.5}", q.a1, q.sigma11.sqrt());
    }

    let rep = asymmetry_tests(&filtered.standardized_series(0), 5)?;
    println!("standardized residuals: sign bias p = {:.3}, leverage p = {:.3}", rep.sign_bias.p_value, rep.leverage.p_value);
    Ok(())
}
