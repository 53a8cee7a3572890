//! Gibbs sampling of the regime coefficients of M1 with its structure known.

use tarlev::inference::{fit_gibbs, GibbsConfig, PriorSpec, StructureCandidate};
use tarlev::tar::presets::m1;
use tarlev::tar::simulate_tar;

fn main() -> tarlev::Result<()> {
    let m = m1();
    let path = simulate_tar(&m.spec, m.z_process()?, 2000, 300, 3)?;
    let structure = StructureCandidate::new(vec![0.0], vec![0, 1])?;
    let prior = PriorSpec::default_for(&path.x, &structure);
    let post = fit_gibbs(&path.x, &path.z, &structure, &prior, GibbsConfig { seed: 1, ..Default::default() })?;

    println!("{} draws kept after {} burn-in; regime sizes {:?}", post.draws.len(), post.burn_in, post.n_per_regime);
    println!("{:<6} {:>8} {:>8} {:>18}", "param", "mean", "sd", "90% interval");
    for s in &post.summaries {
        println!("{:<6} {:>8.4} {:>8.4}   [{:.4}, {:.4}]", s.name, s.mean, s.sd, s.lower, s.upper);
    }
    println!("split R-hat of the noise variances: {:.4?}", post.rhat_variance);
    println!("truth: a0_1 0.6, h2_1 0.49, a0_2 0.2, a1_2 0.4, h2_2 1.21");
    Ok(())
}
