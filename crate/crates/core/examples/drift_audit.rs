//! Moment bound and drift/minorization search on a parameter box.

use mestlab::chain::{check_drift, check_iota, lyapunov_ratio, InnovationLaw, ParamBox, DEFAULT_S_LADDER};

fn audit(label: &str, bx: &ParamBox) -> mestlab::Result<()> {
    let iota = check_iota(bx)?;
    let report = check_drift(bx, &DEFAULT_S_LADDER)?;
    println!("{label}");
    println!("  iota          {iota:.6}");
    println!("  varrho        {:.6}", report.varrho);
    println!("  small set s   {:?}", report.s);
    println!("  varsigma      {:?}", report.varsigma);
    println!("  minorization  {:.4}", report.minorization_mass);
    println!("  verdict       {:?}", report.verdict);
    Ok(())
}

fn main() -> mestlab::Result<()> {
    let narrow = ParamBox::lattice(0.1, (0.5, 1.0), (0.01, 0.04), 7.0, InnovationLaw::StandardGaussian, [5, 3, 3])?;
    audit("rho_bar = 0.1, b in [0.01, 0.04], p = 7", &narrow)?;

    let wide = ParamBox::lattice(0.9, (0.5, 1.0), (0.01, 0.25), 7.0, InnovationLaw::StandardGaussian, [3, 2, 2])?;
    audit("rho_bar = 0.9, b in [0.01, 0.25], p = 7", &wide)?;

    // QV/V along x for the worst corner of the narrow box
    let corner = narrow.grid.last().copied().expect("non-empty grid");
    println!("QV/V at {}", corner.id());
    for x in [0.0, 1.0, 5.0, 20.0, 100.0] {
        println!("  x = {x:>5}  {:.5}", lyapunov_ratio(&corner, narrow.p, x)?);
    }
    Ok(())
}
