//! Kolmogorov distance to the normal law along an n-ladder, with the
//! log-log rate fit. Pass `b` to measure the two-step b_hat instead of rho_hat.
//!
//! cargo run --release --example be_curve -- rho
//! cargo run --release --example be_curve -- b

use mestlab::bemetrics::{be_curve, Correction, CurveTarget, Estimator};
use mestlab::chain::ModelParams;

fn main() -> mestlab::Result<()> {
    let which = std::env::args().nth(1).unwrap_or_else(|| "rho".into());
    let (estimator, correction) = match which.as_str() {
        "b" => (Estimator::B { b_min: 0.01, b_max: 0.5 }, Correction::Log),
        _ => (Estimator::Rho, Correction::None),
    };
    let theta = ModelParams::new(0.5, 1.0, 0.25)?;
    let ladder = [250, 500, 1000, 2000, 4000, 8000];
    let curve = be_curve(&theta, &ladder, 2000, 11, CurveTarget::Estimator { estimator }, correction)?;

    println!("{} {} R = {}", curve.scope, curve.estimator, curve.replications);
    for &(n, d) in &curve.points {
        println!("  n = {n:>5}  D = {d:.4}  sqrt(n) D = {:.3}", (n as f64).sqrt() * d);
    }
    println!("slope {:.3} ({} correction), stability ratio {:.2}", curve.slope, curve.correction.name(), curve.stability_ratio());
    curve.write_csv(std::io::stdout().lock(), true)?;
    Ok(())
}
