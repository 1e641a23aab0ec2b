//! Asymptotic variance of S_n(F') three ways: closed form, batch means and
//! the curvature of the leading eigenvalue of the discretized Fourier kernel.

use mestlab::chain::{simulate, ModelParams};
use mestlab::functional::AdditiveFunctional;
use mestlab::spectral::{spectral_report_auto, GridSpec};

fn main() -> mestlab::Result<()> {
    let f = AdditiveFunctional::Fprime;
    for (r, a, b) in [(0.0, 1.0, 0.0), (0.3, 1.0, 0.1), (-0.3, 1.0, 0.2)] {
        let theta = ModelParams::new(r, a, b)?;
        let grid = GridSpec::default_for(&theta)?;
        let rep = spectral_report_auto(&theta, f.evaluator(&theta)?, &grid)?;
        let batch = f.batch_means_variance(&simulate(&theta, 1_000_000, 5)?, 1000)?;
        println!("{}", theta.id());
        println!("  grid        L = {:.2}, N = {}", grid.half_width, grid.nodes);
        println!("  lambda(0)   {:.12}", rep.lambda0);
        println!("  lambda'(0)  {:.2e}", rep.lambda_prime0.norm());
        println!("  spectral    {:.5}  (doubled grid {:.5}, converged {})", rep.sigma_sq, rep.sigma_sq_doubled, rep.converged);
        println!("  closed form {:.5}", f.theory_variance(&theta)?);
        println!("  batch means {batch:.5}");
    }
    Ok(())
}
