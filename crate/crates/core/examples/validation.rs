//! Pseudo-residual diagnostics for a correct and a misspecified model.

use tarlev::inference::validate;
use tarlev::tar::presets::m2;
use tarlev::tar::{simulate_tar, Regime, TarSpec};

fn main() -> tarlev::Result<()> {
    let m = m2();
    let path = simulate_tar(&m.spec, m.z_process()?, 1000, 300, 17)?;

    // the same thresholds with the autoregressive terms dropped
    let regimes = m.spec.regimes().iter().map(|r| Regime::new(r.intercept / r.phi_at_one(), vec![], r.h)).collect();
    let wrong = TarSpec::new(m.spec.thresholds().to_vec(), regimes)?;

    for (label, spec) in [("true", &m.spec), ("misspecified", &wrong)] {
        let rep = validate(spec, &path.x, &path.regimes, 20, 0.05)?;
        println!(
            "{label}: residual mean {:+.3}, variance {:.3}, Ljung-Box p {:.3e}, ACF inside band {:.0}%, CUSUM inside {}, CUSUMSQ inside {}",
            rep.residual_mean,
            rep.residual_variance,
            rep.ljung_box.p_value,
            100.0 * rep.correlogram.acf_inside_rate(),
            rep.cusum.cusum_inside,
            rep.cusum.cusumsq_inside
        );
    }
    Ok(())
}
