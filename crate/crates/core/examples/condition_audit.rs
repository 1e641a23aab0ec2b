//! How often the first-order residual exceeds r_n and how often the estimate
//! strays by more than d, for both estimators.

use mestlab::bemetrics::{audit_conditions, Estimator};
use mestlab::chain::ModelParams;

fn main() -> mestlab::Result<()> {
    let n = 4000;
    let r_n = (n as f64).ln() / n as f64;
    let b = Estimator::B { b_min: 0.01, b_max: 0.5 };
    println!("{:<22} {:>6} {:>8} {:>8}", "theta", "est", "v3", "v6");
    for a0 in [0.1, 0.25, 0.5, 1.0] {
        let theta = ModelParams::new(0.3, a0, 0.1)?;
        let rho = audit_conditions(&theta, n, 2000, 1, &Estimator::Rho, 0.0, 0.25)?;
        let bh = audit_conditions(&theta, n, 2000, 1, &b, r_n, 0.25)?;
        println!("{:<22} {:>6} {:>8.4} {:>8.4}", theta.id(), "rho", rho.v3_freq, rho.v6_freq);
        println!("{:<22} {:>6} {:>8.4} {:>8.4}", theta.id(), "b", bh.v3_freq, bh.v6_freq);
    }
    Ok(())
}
