//! Simulate a bivariate VAR(1)-A-BEKK(1,1) and recover it by maximum
//! likelihood.

use tarlev::bekk::{fit_bekk, simulate_bekk, BekkParams, FitConfig};

fn main() -> tarlev::Result<()> {
    let truth = BekkParams {
        p: 1,
        mu: [0.05, 0.02],
        gamma: vec![[[0.1, 0.05], [0.03, -0.1]]],
        c: [[0.3, 0.1], [0.0, 0.25]],
        lambda: [[0.3, 0.05], [0.1, 0.25]],
        theta: [[0.85, 0.02], [0.02, 0.85]],
        d: [[0.3, 0.05], [0.05, 0.3]],
    };
    let data = simulate_bekk(&truth, 3000, 500, 11)?.returns;
    let fit = fit_bekk(&data, 1, &FitConfig::default())?;
    println!(
        "log-likelihood {:.3} after {} iterations (converged: {}, |grad| {:.2e})",
        fit.log_likelihood, fit.iterations, fit.converged, fit.grad_norm
    );
    let tv = truth.to_vec();
    let mut k = 0;
    for block in fit.table() {
        println!("{}", block.block);
        for e in block.entries {
            println!("  {:<10} {:>9.4} ({:.4})  t {:>7.2}   true {:>7.4}", e.name, e.estimate, e.std_error, e.t_stat, tv[k]);
            k += 1;
        }
    }
    Ok(())
}
