//! Threshold nonlinearity test and NAIC structure search on data simulated
//! from M1, followed by a least-squares fit of the chosen structure.

use tarlev::inference::{fit_least_squares, identify_structure, nonlinearity_test, ThresholdGrid};
use tarlev::tar::presets::m1;
use tarlev::tar::simulate_tar;

fn main() -> tarlev::Result<()> {
    let m = m1();
    let path = simulate_tar(&m.spec, m.z_process()?, 1500, 300, 9)?;

    let nl = nonlinearity_test(&path.x, &path.z, 2, &[0, 1])?;
    println!("nonlinearity: F = {:.3}, p = {:.2e}, delay {}", nl.f_statistic, nl.p_value, nl.best_delay);

    let rep = identify_structure(&path.x, &path.z, 3, 3, &ThresholdGrid::default())?;
    for c in rep.candidates.iter().take(5) {
        println!(
            "  l = {}  thresholds {:.3?}  orders {:?}  NAIC {:.5}",
            c.structure.l, c.structure.thresholds, c.structure.orders, c.naic
        );
    }
    if let Some(lin) = &rep.linear_baseline {
        println!("  linear AR({}) NAIC {:.5}", lin.structure.orders[0], lin.naic);
    }

    let fit = fit_least_squares(&path.x, &path.z, &rep.best.structure)?;
    for (j, r) in fit.regimes().iter().enumerate() {
        println!("regime {}: a0 {:.3}  ar {:.3?}  h {:.3}", j + 1, r.intercept, r.ar, r.h);
    }
    Ok(())
}
