//! Least-squares rho_hat, tau_hat^2 and the two-step b_hat on one path, plus
//! the first-order residual decomposition for b_hat.

use mestlab::chain::{simulate, ModelParams};
use mestlab::mest::{self, FnCriterion, LeastSquaresAr};

fn main() -> mestlab::Result<()> {
    let theta = ModelParams::new(0.3, 1.0, 0.2)?;
    let n = 100_000;
    let traj = simulate(&theta, n, 7)?;

    let ls = mest::minimize(&LeastSquaresAr::default(), &traj, 0.0)?;
    let rho = mest::rho_hat(&traj)?;
    let tau2 = mest::tau_hat_sq(&traj);
    println!("rho_hat (closed form)  {rho:.6}");
    println!("rho_hat (minimizer)    {:.6}  M'_n = {:.2e}", ls.alpha_hat, ls.m_prime_at_hat);
    println!("tau_hat^2              {tau2:.6}");

    let b = mest::b_hat(&traj, rho, tau2, (0.01, 0.9))?;
    println!("b_hat                  {:.6}  (truth {})", b.alpha_hat, theta.b0);

    let r = mest::v3_residual(&traj, rho, tau2, b.alpha_hat)?;
    println!("M'_n(b_hat) at true plug-ins {:.3e}", r.m_prime);
    println!("  A_n {:.3e}  D1 {:.3e}  D2 {:.3e}  D3 {:.3e}  gap {:.1e}", r.a_n, r.delta1, r.delta2, r.delta3, r.identity_gap);
    println!("  log n / n = {:.3e}", (n as f64).ln() / n as f64);

    // any smooth contrast works with the generic minimizer
    let huber = FnCriterion {
        f: |a: f64, x: f64, y: f64| {
            let r = y - a * x;
            if r.abs() < 1.0 { 0.5 * r * r } else { r.abs() - 0.5 }
        },
        f_prime: |a: f64, x: f64, y: f64| -x * (y - a * x).clamp(-1.0, 1.0),
        f_second: |a: f64, x: f64, y: f64| if (y - a * x).abs() < 1.0 { x * x } else { 0.0 },
        domain: (-0.99, 0.99),
    };
    let h = mest::minimize(&huber, &traj, 0.0)?;
    println!("Huber rho_hat          {:.6}", h.alpha_hat);
    Ok(())
}
