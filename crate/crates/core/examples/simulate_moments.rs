//! Closed-form skewness and kurtosis of the three simulation models next to
//! a Monte Carlo rerun (1000 paths of length 300 after a burn-in of 300).

use tarlev::tar::presets::{m1, m2, m3};
use tarlev::tar::{check_stationarity, replicate_moments, unconditional_moments};

fn main() -> tarlev::Result<()> {
    for model in [m1(), m2(), m3()] {
        let stationary = check_stationarity(&model.spec).iter().all(|r| r.stationary);
        let theory = unconditional_moments(&model.spec, &model.probs)?;
        let sim = replicate_moments(&model.spec, model.z_process()?, 1000, 300, 300, 42)?;
        println!("{} (stationary: {stationary}, p = {:.4?})", model.name, model.probs.marginal);
        println!("  mean {:.4}  variance {:.4}", theory.mean, theory.variance);
        println!(
            "  skewness {:+.4}   sample {:+.4} +/- 2 x {:.4} -> ({:+.4}, {:+.4})",
            theory.skewness, sim.skewness.mean, sim.skewness.sd, sim.skewness.lower, sim.skewness.upper
        );
        println!(
            "  kurtosis {:.4}    sample {:.4} +/- 2 x {:.4} -> ({:.4}, {:.4})",
            theory.kurtosis, sim.kurtosis.mean, sim.kurtosis.sd, sim.kurtosis.lower, sim.kurtosis.upper
        );
    }
    Ok(())
}
