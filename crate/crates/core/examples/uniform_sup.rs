//! Sup over a parameter grid of the Kolmogorov distance of standardized rho_hat.

use mestlab::bemetrics::{uniform_sup_distance, Estimator, Scale};
use mestlab::chain::{InnovationLaw, ParamBox};

fn main() -> mestlab::Result<()> {
    let bx = ParamBox::lattice(0.4, (0.5, 1.0), (0.05, 0.2), 7.0, InnovationLaw::StandardGaussian, [5, 1, 1])?;
    for n in [500, 2000, 8000] {
        let sup = uniform_sup_distance(&bx, n, 2000, 3, &Estimator::Rho, Scale::Theory)?;
        println!("n = {n:>5}  sup D = {:.4}  at {}  sqrt(n) sup = {:.3}", sup.sup, sup.argmax, (n as f64).sqrt() * sup.sup);
    }
    Ok(())
}
