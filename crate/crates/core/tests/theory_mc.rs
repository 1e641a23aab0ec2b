use mestlab::chain::{simulate, ModelParams};
use mestlab::functional::AdditiveFunctional;
use mestlab::numeric::batch_means_variance;
use mestlab::theory;

fn grid_thetas() -> Vec<ModelParams> {
    [(0.0, 1.0, 0.0), (0.3, 1.0, 0.1), (-0.3, 1.0, 0.2)].iter().map(|&(r, a, b)| ModelParams::new(r, a, b).unwrap()).collect()
}

#[test]
fn batch_means_sigma1_sq_within_five_percent() {
    for (i, theta) in grid_thetas().iter().enumerate() {
        let path = simulate(theta, 1_000_000, 100 + i as u64).unwrap();
        let bm = AdditiveFunctional::Fprime.batch_means_variance(&path, 10_000).unwrap();
        let th = theory::sigma1_sq(theta).unwrap();
        assert!((bm / th - 1.0).abs() < 0.05, "{}: batch {bm} theory {th}", theta.id());
    }
}

#[test]
fn long_path_second_moment_within_three_se() {
    for (i, theta) in grid_thetas().iter().enumerate() {
        let n = 2_000_000;
        let path = simulate(theta, n, 200 + i as u64).unwrap();
        let sq: Vec<f64> = path.x[1..].iter().map(|x| x * x).collect();
        let mean = sq.iter().sum::<f64>() / n as f64;
        let se = (batch_means_variance(&sq, 1000).unwrap() / n as f64).sqrt();
        let m2 = theory::m2(theta).unwrap();
        assert!((mean - m2).abs() <= 3.0 * se, "{}: {mean} vs {m2} (se {se})", theta.id());
    }
}

#[test]
fn hessian_mean_matches_m_of_theta() {
    let theta = ModelParams::new(0.5, 1.0, 0.25).unwrap();
    assert_eq!(theory::m_of_theta(&theta).unwrap(), 4.0);
    let th = ModelParams::new(0.3, 1.0, 0.1).unwrap();
    let path = simulate(&th, 1_000_000, 9).unwrap();
    let mean = path.x[..path.x.len() - 1].iter().map(|x| 2.0 * x * x).sum::<f64>() / 1e6;
    assert!((mean / theory::m_of_theta(&th).unwrap() - 1.0).abs() < 0.02);
}
