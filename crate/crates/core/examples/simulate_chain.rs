//! Simulate the AR(1)-ARCH(1) chain from zero and print a few path statistics.
//!
//! cargo run --release --example simulate_chain -- 0.3 1.0 0.1 10000

use mestlab::chain::{simulate, ModelParams};
use mestlab::theory;

fn main() -> mestlab::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).map(|a| a.parse().expect("numeric argument")).collect();
    let (rho0, a0, b0) = match args.as_slice() {
        [r, a, b, ..] => (*r, *a, *b),
        _ => (0.3, 1.0, 0.1),
    };
    let n = args.get(3).map(|&n| n as usize).unwrap_or(10_000);

    let theta = ModelParams::new(rho0, a0, b0)?;
    let traj = simulate(&theta, n, 42)?;

    let mean_sq = traj.x[1..].iter().map(|x| x * x).sum::<f64>() / n as f64;
    let max_abs = traj.x.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    println!("theta      {}", theta.id());
    println!("n          {n}");
    println!("mean X^2   {mean_sq:.4}   (stationary {:.4})", theory::m2(&theta)?);
    println!("max |X|    {max_abs:.3}");
    println!("first 5    {:?}", &traj.x[..6.min(traj.x.len())]);

    let mut out = std::io::stdout().lock();
    if std::env::var_os("DUMP_CSV").is_some() {
        traj.write_csv(&mut out)?;
    }
    Ok(())
}
