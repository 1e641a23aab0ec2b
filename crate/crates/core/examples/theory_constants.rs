//! Closed-form stationary constants next to long-path Monte Carlo estimates.

use mestlab::chain::{simulate, ModelParams};
use mestlab::functional::AdditiveFunctional;
use mestlab::theory;

fn main() -> mestlab::Result<()> {
    let n = 1_000_000;
    println!("{:<22} {:>9} {:>9} {:>9} {:>10} {:>10} {:>8}", "theta", "m", "E X^2", "mc", "sigma1^2", "batch", "tau");
    for (r, a, b) in [(0.0, 1.0, 0.0), (0.3, 1.0, 0.1), (-0.3, 1.0, 0.2), (0.5, 1.0, 0.25)] {
        let theta = ModelParams::new(r, a, b)?;
        let rep = theory::report(&theta)?;
        let path = simulate(&theta, n, 3)?;
        let mc_m2 = path.x[1..].iter().map(|x| x * x).sum::<f64>() / n as f64;
        let batch = AdditiveFunctional::Fprime.batch_means_variance(&path, 1000)?;
        println!(
            "{:<22} {:>9.5} {:>9.5} {:>9.5} {:>10.5} {:>10.5} {:>8.5}",
            theta.id(),
            rep.m_theta,
            rep.m2,
            mc_m2,
            rep.sigma1_sq,
            batch,
            rep.tau
        );
    }
    Ok(())
}
