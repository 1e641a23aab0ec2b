//! Minimum-contrast estimation: the empirical criterion
//! `M_n(alpha) = n^-1 sum F(alpha, X_{k-1}, X_k)`, its companions `M'_n` and
//! `M''_n`, a grid + golden-section minimizer honouring the tolerance `c_n`,
//! and the closed-form estimators of the AR(1)-ARCH(1) example.

use crate::chain::Trajectory;
use crate::error::{Error, Result};
use crate::numeric::KahanSum;
use crate::theory;

/// A contrast functional `F` with companions `F'` and `F''` on the interval
/// `domain()`. `F'` and `F''` are usually, but not necessarily, the
/// derivatives of `F` in `alpha`.
pub trait Criterion: Sync {
    fn f(&self, alpha: f64, x: f64, y: f64) -> f64;
    fn f_prime(&self, alpha: f64, x: f64, y: f64) -> f64;
    fn f_second(&self, alpha: f64, x: f64, y: f64) -> f64;
    fn domain(&self) -> (f64, f64);
}

/// Criterion assembled from closures.
pub struct FnCriterion<F, G, H> {
    pub f: F,
    pub f_prime: G,
    pub f_second: H,
    pub domain: (f64, f64),
}

impl<F, G, H> Criterion for FnCriterion<F, G, H>
where
    F: Fn(f64, f64, f64) -> f64 + Sync,
    G: Fn(f64, f64, f64) -> f64 + Sync,
    H: Fn(f64, f64, f64) -> f64 + Sync,
{
    fn f(&self, a: f64, x: f64, y: f64) -> f64 {
        (self.f)(a, x, y)
    }
    fn f_prime(&self, a: f64, x: f64, y: f64) -> f64 {
        (self.f_prime)(a, x, y)
    }
    fn f_second(&self, a: f64, x: f64, y: f64) -> f64 {
        (self.f_second)(a, x, y)
    }
    fn domain(&self) -> (f64, f64) {
        self.domain
    }
}

/// `F(rho, x, y) = (y - rho x)^2`.
#[derive(Debug, Clone, Copy)]
pub struct LeastSquaresAr {
    pub domain: (f64, f64),
}

impl Default for LeastSquaresAr {
    fn default() -> Self {
        LeastSquaresAr { domain: (-1.0, 1.0) }
    }
}

impl Criterion for LeastSquaresAr {
    fn f(&self, rho: f64, x: f64, y: f64) -> f64 {
        (y - rho * x).powi(2)
    }
    fn f_prime(&self, rho: f64, x: f64, y: f64) -> f64 {
        -2.0 * x * (y - rho * x)
    }
    fn f_second(&self, _rho: f64, x: f64, _y: f64) -> f64 {
        2.0 * x * x
    }
    fn domain(&self) -> (f64, f64) {
        self.domain
    }
}

/// Squared ARCH residual `eta_k(b, r, v)^2` with
/// `eta_k = (y - r x)^2 - v (1 - r^2 - b) - b x^2`, for fixed plug-ins `(r, v)`.
#[derive(Debug, Clone, Copy)]
pub struct ArchVariance {
    pub r: f64,
    pub v: f64,
    pub domain: (f64, f64),
}

impl ArchVariance {
    #[inline]
    pub fn eta(&self, b: f64, x: f64, y: f64) -> f64 {
        (y - self.r * x).powi(2) - self.v * (1.0 - self.r * self.r - b) - b * x * x
    }
}

impl Criterion for ArchVariance {
    fn f(&self, b: f64, x: f64, y: f64) -> f64 {
        self.eta(b, x, y).powi(2)
    }
    fn f_prime(&self, b: f64, x: f64, y: f64) -> f64 {
        2.0 * (self.v - x * x) * self.eta(b, x, y)
    }
    fn f_second(&self, _b: f64, x: f64, _y: f64) -> f64 {
        2.0 * (self.v - x * x).powi(2)
    }
    fn domain(&self) -> (f64, f64) {
        self.domain
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimationResult {
    pub alpha_hat: f64,
    pub criterion_value: f64,
    pub m_prime_at_hat: f64,
    pub c_n_used: f64,
    pub iterations: usize,
    /// Minimum of the criterion over the coarse scan grid.
    pub grid_min: f64,
}

pub const ESTIMATION_CSV_HEADER: &str =
    "theta_id,n,seed,estimator,alpha_hat,criterion_value,m_prime_at_hat";

impl EstimationResult {
    pub fn csv_row(&self, theta_id: &str, n: usize, seed: u64, estimator: &str) -> String {
        format!(
            "{theta_id},{n},{seed},{estimator},{},{},{}",
            self.alpha_hat, self.criterion_value, self.m_prime_at_hat
        )
    }
}

fn check_alpha<C: Criterion + ?Sized>(crit: &C, alpha: f64) -> Result<()> {
    let (lo, hi) = crit.domain();
    if !(alpha >= lo && alpha <= hi) {
        return Err(Error::OutsideDomain { alpha, lo, hi });
    }
    Ok(())
}

fn empirical_mean<C, G>(crit: &C, traj: &Trajectory, alpha: f64, g: G) -> Result<f64>
where
    C: Criterion + ?Sized,
    G: Fn(&C, f64, f64, f64) -> f64,
{
    check_alpha(crit, alpha)?;
    if traj.is_empty() {
        return Err(Error::DegenerateData("trajectory has no transitions".into()));
    }
    let s: KahanSum = traj.pairs().map(|(x, y)| g(crit, alpha, x, y)).collect();
    Ok(s.value() / traj.len() as f64)
}

/// `M_n(alpha)`.
pub fn criterion_value<C: Criterion + ?Sized>(crit: &C, traj: &Trajectory, alpha: f64) -> Result<f64> {
    empirical_mean(crit, traj, alpha, |c, a, x, y| c.f(a, x, y))
}

/// `M'_n(alpha)`.
pub fn m_prime<C: Criterion + ?Sized>(crit: &C, traj: &Trajectory, alpha: f64) -> Result<f64> {
    empirical_mean(crit, traj, alpha, |c, a, x, y| c.f_prime(a, x, y))
}

/// `M''_n(alpha)`.
pub fn m_second<C: Criterion + ?Sized>(crit: &C, traj: &Trajectory, alpha: f64) -> Result<f64> {
    empirical_mean(crit, traj, alpha, |c, a, x, y| c.f_second(a, x, y))
}

#[derive(Debug, Clone, Copy)]
pub struct MinimizeOptions {
    pub grid_points: usize,
    pub x_tol: f64,
    pub max_iter: usize,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions { grid_points: 512, x_tol: 1e-10, max_iter: 500 }
    }
}

/// Outcome of [`minimize_scalar`] before the derivative is attached.
#[derive(Debug, Clone, Copy)]
pub struct ScalarMinimum {
    pub x: f64,
    pub value: f64,
    pub grid_min: f64,
    pub iterations: usize,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Coarse scan of `objective` on `[lo, hi]` followed by golden-section
/// refinement of the best bracket. When two interior values tie to rounding,
/// the sign of `slope` at their midpoint chooses the side to keep.
///
/// The returned value never exceeds the scan minimum; with `c_n > 0` the
/// refinement may stop once the bracket values agree to within `c_n / 2`.
pub fn minimize_scalar<F, D>(
    objective: F,
    slope: D,
    (lo, hi): (f64, f64),
    c_n: f64,
    opts: &MinimizeOptions,
) -> Result<ScalarMinimum>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::ParameterDomain { name: "domain", reason: format!("need finite lo < hi, got ({lo}, {hi})") });
    }
    if !(c_n >= 0.0) {
        return Err(Error::ParameterDomain { name: "c_n", reason: format!("need c_n >= 0, got {c_n}") });
    }
    let g = opts.grid_points.max(3);
    let node = |i: usize| if i == g - 1 { hi } else { lo + (hi - lo) * i as f64 / (g - 1) as f64 };
    let mut best_i = 0;
    let mut best_v = f64::INFINITY;
    for i in 0..g {
        let a = node(i);
        let v = objective(a);
        if !v.is_finite() {
            return Err(Error::NonFinite { alpha: a });
        }
        if v < best_v {
            best_v = v;
            best_i = i;
        }
    }
    let grid_min = best_v;
    let mut best_x = node(best_i);

    let mut a = node(best_i.saturating_sub(1));
    let mut b = node((best_i + 1).min(g - 1));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = objective(c);
    let mut fd = objective(d);
    let mut iterations = 0;
    while (b - a) > opts.x_tol && iterations < opts.max_iter {
        iterations += 1;
        for (x, v) in [(c, fc), (d, fd)] {
            if v < best_v {
                best_v = v;
                best_x = x;
            }
        }
        if c_n > 0.0 && (fc - fd).abs() <= 0.5 * c_n && best_v <= grid_min + c_n {
            break;
        }
        let scale = fc.abs().max(fd.abs()).max(f64::MIN_POSITIVE);
        let keep_left = if (fc - fd).abs() <= 8.0 * f64::EPSILON * scale {
            slope(0.5 * (c + d)) > 0.0
        } else {
            fc < fd
        };
        if keep_left {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = objective(d);
        }
    }
    for (x, v) in [(c, fc), (d, fd)] {
        if v < best_v {
            best_v = v;
            best_x = x;
        }
    }
    // Values near the minimum tie to rounding; the bracket itself is the
    // sharper location estimate.
    let mid = 0.5 * (a + b);
    let f_mid = objective(mid);
    if f_mid <= best_v + 8.0 * f64::EPSILON * best_v.abs() && f_mid <= grid_min + c_n {
        best_v = f_mid;
        best_x = mid;
    }
    Ok(ScalarMinimum { x: best_x, value: best_v, grid_min, iterations })
}

/// An M-estimator: `M_n(alpha_hat) <= min M_n + c_n`, with the minimum taken
/// over the closure of the criterion domain.
pub fn minimize<C: Criterion + ?Sized>(crit: &C, traj: &Trajectory, c_n: f64) -> Result<EstimationResult> {
    minimize_with(crit, traj, c_n, &MinimizeOptions::default())
}

pub fn minimize_with<C: Criterion + ?Sized>(
    crit: &C,
    traj: &Trajectory,
    c_n: f64,
    opts: &MinimizeOptions,
) -> Result<EstimationResult> {
    if traj.is_empty() {
        return Err(Error::DegenerateData("trajectory has no transitions".into()));
    }
    let objective = |a: f64| {
        let s: KahanSum = traj.pairs().map(|(x, y)| crit.f(a, x, y)).collect();
        s.value() / traj.len() as f64
    };
    let slope = |a: f64| {
        let s: KahanSum = traj.pairs().map(|(x, y)| crit.f_prime(a, x, y)).collect();
        s.value()
    };
    let m = minimize_scalar(objective, slope, crit.domain(), c_n, opts)?;
    Ok(EstimationResult {
        alpha_hat: m.x,
        criterion_value: m.value,
        m_prime_at_hat: m_prime(crit, traj, m.x)?,
        c_n_used: c_n,
        iterations: m.iterations,
        grid_min: m.grid_min,
    })
}

/// Least-squares slope `sum X_k X_{k-1} / sum X_{k-1}^2`.
pub fn rho_hat(traj: &Trajectory) -> Result<f64> {
    let mut num = KahanSum::new();
    let mut den = KahanSum::new();
    for (x, y) in traj.pairs() {
        num.add(x * y);
        den.add(x * x);
    }
    let den = den.value();
    if den == 0.0 {
        return Err(Error::DegenerateData("sum of X_{k-1}^2 is zero".into()));
    }
    Ok(num.value() / den)
}

/// `n^-1 sum_{k=1}^n X_k^2`.
pub fn tau_hat_sq(traj: &Trajectory) -> f64 {
    let s: KahanSum = traj.x[1..].iter().map(|x| x * x).collect();
    s.value() / traj.len().max(1) as f64
}

/// Sufficient statistics of the quadratic `T_n(b; r, v) = S_cc + 2 b S_cd + b^2 S_dd`
/// where `eta_k = c_k + b d_k`, `d_k = v - X_{k-1}^2`.
#[derive(Debug, Clone, Copy)]
struct ArchQuadratic {
    s_cc: f64,
    s_cd: f64,
    s_dd: f64,
}

impl ArchQuadratic {
    fn new(traj: &Trajectory, r: f64, v: f64) -> Self {
        let (mut cc, mut cd, mut dd) = (KahanSum::new(), KahanSum::new(), KahanSum::new());
        for (x, y) in traj.pairs() {
            let c = (y - r * x).powi(2) - v * (1.0 - r * r);
            let d = v - x * x;
            cc.add(c * c);
            cd.add(c * d);
            dd.add(d * d);
        }
        let n = traj.len() as f64;
        ArchQuadratic { s_cc: cc.value() / n, s_cd: cd.value() / n, s_dd: dd.value() / n }
    }

    fn value(&self, b: f64) -> f64 {
        self.s_cc + b * (2.0 * self.s_cd + b * self.s_dd)
    }

    fn slope(&self, b: f64) -> f64 {
        2.0 * (self.s_cd + b * self.s_dd)
    }
}

/// Unconstrained minimizer of `T_n(b; r, v)`,
/// `-sum (v - X_{k-1}^2) c_k / sum (v - X_{k-1}^2)^2`.
pub fn b_hat_closed_form(traj: &Trajectory, r: f64, v: f64) -> Result<f64> {
    if traj.is_empty() {
        return Err(Error::DegenerateData("trajectory has no transitions".into()));
    }
    let q = ArchQuadratic::new(traj, r, v);
    if q.s_dd == 0.0 {
        return Err(Error::DegenerateData("sum of (v - X_{k-1}^2)^2 is zero".into()));
    }
    Ok(-q.s_cd / q.s_dd)
}

/// Agreement required between the scan/golden minimizer and the closed form.
pub const B_HAT_AGREEMENT: f64 = 1e-8;

/// Two-step estimator of `b0`: minimize `T_n(b; rho_plug, tausq_plug)` over
/// `b_domain`. When the unconstrained minimizer is interior, the numerical
/// minimizer must agree with it to [`B_HAT_AGREEMENT`].
pub fn b_hat(traj: &Trajectory, rho_plug: f64, tausq_plug: f64, b_domain: (f64, f64)) -> Result<EstimationResult> {
    if !rho_plug.is_finite() || !tausq_plug.is_finite() {
        return Err(Error::ParameterDomain { name: "plug-in", reason: "plug-ins must be finite".into() });
    }
    if !(b_domain.0 > 0.0 && b_domain.1 < 1.0) {
        return Err(Error::ParameterDomain {
            name: "b_domain",
            reason: format!("need 0 < m_b < M_b < 1, got {b_domain:?}"),
        });
    }
    let closed = b_hat_closed_form(traj, rho_plug, tausq_plug)?;
    let q = ArchQuadratic::new(traj, rho_plug, tausq_plug);
    let m = minimize_scalar(|b| q.value(b), |b| q.slope(b), b_domain, 0.0, &MinimizeOptions::default())?;
    if closed > b_domain.0 && closed < b_domain.1 && (m.x - closed).abs() > B_HAT_AGREEMENT {
        return Err(Error::Numerical(format!(
            "golden-section b = {} disagrees with closed form {closed}",
            m.x
        )));
    }
    let crit = ArchVariance { r: rho_plug, v: tausq_plug, domain: b_domain };
    Ok(EstimationResult {
        alpha_hat: m.x,
        criterion_value: m.value,
        m_prime_at_hat: m_prime(&crit, traj, m.x)?,
        c_n_used: 0.0,
        iterations: m.iterations,
        grid_min: m.grid_min,
    })
}

/// `M'_n(b_hat)` evaluated at the true plug-ins `(rho0, tau0^2)` and its
/// split `A_n + Delta_1n + Delta_2n + Delta_3n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct V3Residual {
    pub m_prime: f64,
    pub a_n: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub delta3: f64,
    /// `|A + D1 + D2 + D3 - M'| / max(|M'|, |A|, |D1|, |D2|, |D3|)`.
    pub identity_gap: f64,
}

impl V3Residual {
    pub fn abs(&self) -> f64 {
        self.m_prime.abs()
    }
}

pub const V3_IDENTITY_TOL: f64 = 1e-9;

/// True-parameter plug-ins come from `traj.theta`: `rho0` and
/// `tau0^2 = m(theta) / 2`.
pub fn v3_residual(traj: &Trajectory, rho_plug: f64, tausq_plug: f64, b_hat: f64) -> Result<V3Residual> {
    if traj.is_empty() {
        return Err(Error::DegenerateData("trajectory has no transitions".into()));
    }
    let rho0 = traj.theta.rho0;
    let tau0 = theory::m_of_theta(&traj.theta)? / 2.0;
    let n = traj.len() as f64;
    let truth = ArchVariance { r: rho0, v: tau0, domain: (0.0, 1.0) };
    let plug = ArchVariance { r: rho_plug, v: tausq_plug, domain: (0.0, 1.0) };

    let (mut mp, mut a, mut d1, mut d2) = (KahanSum::new(), KahanSum::new(), KahanSum::new(), KahanSum::new());
    for (x, y) in traj.pairs() {
        let w = tau0 - x * x;
        mp.add(w * truth.eta(b_hat, x, y));
        a.add(w * plug.eta(b_hat, x, y));
        d1.add(w * (y - rho0 * x) * x);
        d2.add(w * x * x);
    }
    let m_prime = 2.0 * mp.value() / n;
    let a_n = 2.0 * a.value() / n;
    let dr = rho_plug - rho0;
    let delta1 = 4.0 * dr * d1.value() / n;
    let delta2 = -2.0 * dr * dr * d2.value() / n;
    let level = tausq_plug * (1.0 - rho_plug * rho_plug - b_hat) - tau0 * (1.0 - rho0 * rho0 - b_hat);
    let x0 = traj.x[0];
    let xn = traj.x[traj.len()];
    let delta3 = 2.0 * level * (tau0 - tausq_plug + (xn * xn - x0 * x0) / n);

    let scale = [m_prime, a_n, delta1, delta2, delta3]
        .iter()
        .fold(f64::MIN_POSITIVE, |m, v| m.max(v.abs()));
    let identity_gap = (a_n + delta1 + delta2 + delta3 - m_prime).abs() / scale;
    Ok(V3Residual { m_prime, a_n, delta1, delta2, delta3, identity_gap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{simulate, simulate_from, simulate_with_innovations, ModelParams};
    use crate::rng::stream;
    use proptest::prelude::*;
    use rand::Rng;

    fn path(x: Vec<f64>) -> Trajectory {
        Trajectory { x, seed: None, theta: ModelParams::new(0.0, 1.0, 0.0).unwrap() }
    }

    fn data_free() -> impl Criterion {
        FnCriterion {
            f: |a: f64, _x: f64, _y: f64| (a - 1.0).powi(2),
            f_prime: |a: f64, _x: f64, _y: f64| 2.0 * (a - 1.0),
            f_second: |_a: f64, _x: f64, _y: f64| 2.0,
            domain: (0.0, 2.0),
        }
    }

    #[test]
    fn criterion_values() {
        let t = path(vec![0.0, 1.0, 2.0]);
        let c = data_free();
        assert_eq!(criterion_value(&c, &t, 0.3).unwrap(), 0.7f64.powi(2));
        let ls = LeastSquaresAr { domain: (-3.0, 3.0) };
        assert_eq!(criterion_value(&ls, &t, 0.0).unwrap(), 2.5);
        assert_eq!(m_prime(&ls, &t, 2.0).unwrap(), 0.0);
        assert_eq!(m_second(&ls, &t, 0.7).unwrap(), 1.0);
        assert!(matches!(criterion_value(&ls, &t, 5.0), Err(Error::OutsideDomain { .. })));
    }

    #[test]
    fn criterion_matches_naive_loop() {
        let theta = ModelParams::new(0.4, 1.0, 0.2).unwrap();
        let ls = LeastSquaresAr::default();
        let mut rng = stream(5);
        for seed in 0..20 {
            let t = simulate(&theta, 2000, seed).unwrap();
            let a: f64 = rng.random_range(-0.9..0.9);
            let mut naive = 0.0;
            for k in 1..t.x.len() {
                naive += (t.x[k] - a * t.x[k - 1]).powi(2);
            }
            naive /= t.len() as f64;
            let v = criterion_value(&ls, &t, a).unwrap();
            assert!((v - naive).abs() <= 1e-12 * naive, "{v} vs {naive}");
        }
    }

    #[test]
    fn m_prime_is_derivative_of_criterion() {
        let theta = ModelParams::new(0.3, 1.0, 0.2).unwrap();
        let t = simulate(&theta, 3000, 17).unwrap();
        let h = 1e-5;
        let ls = LeastSquaresAr::default();
        let arch = ArchVariance { r: 0.3, v: 1.4, domain: (0.0, 1.0) };
        for a in [-0.5, 0.1, 0.6] {
            let fd = (criterion_value(&ls, &t, a + h).unwrap() - criterion_value(&ls, &t, a - h).unwrap()) / (2.0 * h);
            assert!((fd - m_prime(&ls, &t, a).unwrap()).abs() < 1e-6);
        }
        for b in [0.1, 0.3, 0.7] {
            let fd = (criterion_value(&arch, &t, b + h).unwrap() - criterion_value(&arch, &t, b - h).unwrap()) / (2.0 * h);
            let mp = m_prime(&arch, &t, b).unwrap();
            assert!((fd - mp).abs() < 1e-6 * mp.abs().max(1.0), "{fd} vs {mp}");
        }
    }

    #[test]
    fn minimize_analytic_quadratic() {
        let t = path(vec![0.0, 1.0]);
        let r = minimize(&data_free(), &t, 0.0).unwrap();
        assert!((r.alpha_hat - 1.0).abs() < 1e-9);
        assert!(r.criterion_value < 1e-18);
        assert!(r.criterion_value <= r.grid_min + r.c_n_used);

        let r = minimize(&data_free(), &t, 0.1).unwrap();
        assert!(r.criterion_value <= 0.1);
        assert_eq!(r.c_n_used, 0.1);
    }

    #[test]
    fn minimize_reports_non_finite_alpha() {
        let c = FnCriterion {
            f: |a: f64, _x: f64, _y: f64| if a > 1.5 { f64::NAN } else { a * a },
            f_prime: |a: f64, _x: f64, _y: f64| 2.0 * a,
            f_second: |_a: f64, _x: f64, _y: f64| 2.0,
            domain: (0.0, 2.0),
        };
        match minimize(&c, &path(vec![0.0, 1.0]), 0.0) {
            Err(Error::NonFinite { alpha }) => assert!(alpha > 1.5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rho_hat_cases() {
        assert_eq!(rho_hat(&path(vec![0.0, 1.0, 2.0])).unwrap(), 2.0);
        let theta = ModelParams::new(0.6, 1.0, 0.0).unwrap();
        let t = simulate_from(&theta, 1.0, &[0.0, 0.0]).unwrap();
        assert_eq!(t.x, vec![1.0, 0.6, 0.36]);
        assert_eq!(rho_hat(&t).unwrap(), 0.6);
        let zero = simulate_with_innovations(&theta, &[0.0; 10]).unwrap();
        assert!(matches!(rho_hat(&zero), Err(Error::DegenerateData(_))));
    }

    #[test]
    fn rho_hat_equals_least_squares_minimizer() {
        let theta = ModelParams::new(0.5, 1.0, 0.2).unwrap();
        let t = simulate(&theta, 5000, 8).unwrap();
        let r = minimize(&LeastSquaresAr::default(), &t, 0.0).unwrap();
        assert!((r.alpha_hat - rho_hat(&t).unwrap()).abs() < 1e-9, "{r:?} {}", rho_hat(&t).unwrap());
        assert!(r.m_prime_at_hat.abs() < 1e-6);
    }

    #[test]
    fn rho_hat_is_consistent() {
        let theta = ModelParams::new(0.5, 1.0, 0.2).unwrap();
        let t = simulate(&theta, 100_000, 2024).unwrap();
        assert!((rho_hat(&t).unwrap() - 0.5).abs() < 0.02);
    }

    #[test]
    fn tau_hat_cases() {
        assert_eq!(tau_hat_sq(&path(vec![0.0, 1.0, 2.0])), 2.5);
        assert_eq!(tau_hat_sq(&path(vec![0.0; 6])), 0.0);
        let theta = ModelParams::new(0.0, 1.0, 0.0).unwrap();
        let t = simulate(&theta, 100_000, 77).unwrap();
        assert!((tau_hat_sq(&t) - 1.0).abs() < 0.02);
    }

    /// Path with `(X_k - r X_{k-1})^2 = v (1 - r^2 - b) + b X_{k-1}^2` exactly.
    fn zero_residual_path(r: f64, v: f64, b: f64, n: usize, seed: u64) -> Trajectory {
        let mut rng = stream(seed);
        let mut x = vec![0.0];
        for _ in 0..n {
            let prev: f64 = *x.last().unwrap();
            let s = (v * (1.0 - r * r - b) + b * prev * prev).sqrt();
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            x.push(r * prev + sign * s);
        }
        Trajectory { x, seed: None, theta: ModelParams::new(r, 1.0, b).unwrap() }
    }

    #[test]
    fn b_hat_recovers_zero_residual_construction() {
        let (r, v, b) = (0.3, 1.5, 0.2);
        let t = zero_residual_path(r, v, b, 500, 4);
        let est = b_hat(&t, r, v, (0.01, 0.9)).unwrap();
        assert!((est.alpha_hat - b).abs() < 1e-8, "{}", est.alpha_hat);
        assert!((b_hat_closed_form(&t, r, v).unwrap() - b).abs() < 1e-10);
    }

    #[test]
    fn b_hat_matches_dense_grid() {
        let theta = ModelParams::new(0.3, 1.0, 0.2).unwrap();
        let dom = (0.01, 0.9);
        for seed in 0..3 {
            let t = simulate(&theta, 2000, seed).unwrap();
            let (r, v) = (rho_hat(&t).unwrap(), tau_hat_sq(&t));
            let est = b_hat(&t, r, v, dom).unwrap();
            // direct O(n) evaluations of T_n on a dense grid
            let crit = ArchVariance { r, v, domain: dom };
            let m = 1_000_000usize;
            let step = (dom.1 - dom.0) / (m - 1) as f64;
            let closed = b_hat_closed_form(&t, r, v).unwrap().clamp(dom.0, dom.1);
            let i0 = ((closed - dom.0) / step).round() as usize;
            let (mut bi, mut bv) = (0, f64::INFINITY);
            for i in i0.saturating_sub(50)..(i0 + 50).min(m) {
                let val = criterion_value(&crit, &t, dom.0 + step * i as f64).unwrap();
                if val < bv {
                    bv = val;
                    bi = i;
                }
            }
            assert!(bi > i0.saturating_sub(50) && bi < (i0 + 49).min(m - 1));
            assert!((est.alpha_hat - (dom.0 + step * bi as f64)).abs() <= step);
        }
    }

    #[test]
    fn b_hat_is_consistent() {
        let theta = ModelParams::new(0.3, 1.0, 0.2).unwrap();
        let t = simulate(&theta, 100_000, 31).unwrap();
        let est = b_hat(&t, rho_hat(&t).unwrap(), tau_hat_sq(&t), (0.01, 0.9)).unwrap();
        assert!((est.alpha_hat - 0.2).abs() < 0.05, "{}", est.alpha_hat);
    }

    #[test]
    fn b_hat_degenerate() {
        // X_{k-1}^2 == v for every k is impossible from X_0 = 0 unless v = 0
        let t = path(vec![0.0, 0.0, 0.0]);
        assert!(matches!(b_hat(&t, 0.0, 0.0, (0.1, 0.5)), Err(Error::DegenerateData(_))));
    }

    #[test]
    fn v3_identity_and_rho_first_order_condition() {
        for (seed, theta) in [(1, (0.3, 1.0, 0.2)), (2, (-0.1, 0.5, 0.04)), (3, (0.0, 1.0, 0.05))] {
            let theta = ModelParams::new(theta.0, theta.1, theta.2).unwrap();
            let t = simulate(&theta, 3000, seed).unwrap();
            let (r, v) = (rho_hat(&t).unwrap(), tau_hat_sq(&t));
            let b = b_hat(&t, r, v, (0.01, 0.9)).unwrap().alpha_hat;
            let res = v3_residual(&t, r, v, b).unwrap();
            assert!(res.identity_gap < V3_IDENTITY_TOL, "{res:?}");
            let ls = LeastSquaresAr::default();
            assert!(m_prime(&ls, &t, r).unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn estimation_csv_row() {
        let r = EstimationResult { alpha_hat: 0.5, criterion_value: 1.25, m_prime_at_hat: 0.0, c_n_used: 0.0, iterations: 3, grid_min: 1.3 };
        assert_eq!(ESTIMATION_CSV_HEADER.split(',').count(), r.csv_row("t0", 10, 7, "rho").split(',').count());
        assert_eq!(r.csv_row("t0", 10, 7, "rho"), "t0,10,7,rho,0.5,1.25,0");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn least_squares_scale_equivariance(seed in 0u64..1000, lambda in prop_oneof![-50.0f64..-0.1, 0.1f64..50.0]) {
            let theta = ModelParams::new(0.4, 1.0, 0.1).unwrap();
            let t = simulate(&theta, 300, seed).unwrap();
            let mut s = t.clone();
            s.x.iter_mut().for_each(|x| *x *= lambda);
            let (r1, r2) = (rho_hat(&t).unwrap(), rho_hat(&s).unwrap());
            prop_assert!((r1 - r2).abs() <= 1e-12 * r1.abs().max(1.0));
            let (v1, v2) = (tau_hat_sq(&t), tau_hat_sq(&s));
            prop_assert!((v2 - lambda * lambda * v1).abs() <= 1e-12 * v2);
        }

        #[test]
        fn eq2_contract_and_first_order_condition(seed in 0u64..1000, c_n in prop_oneof![Just(0.0), 0.0f64..0.05]) {
            let theta = ModelParams::new(0.2, 1.0, 0.1).unwrap();
            let t = simulate(&theta, 400, seed).unwrap();
            let r = minimize(&LeastSquaresAr::default(), &t, c_n).unwrap();
            prop_assert!(r.criterion_value <= r.grid_min + r.c_n_used);
            if c_n == 0.0 {
                prop_assert!(r.m_prime_at_hat.abs() < 1e-6);
            }
        }

        #[test]
        fn b_hat_agrees_with_closed_form_when_interior(seed in 0u64..1000) {
            let theta = ModelParams::new(0.2, 1.0, 0.3).unwrap();
            let t = simulate(&theta, 1000, seed).unwrap();
            let (r, v) = (rho_hat(&t).unwrap(), tau_hat_sq(&t));
            let closed = b_hat_closed_form(&t, r, v).unwrap();
            let est = b_hat(&t, r, v, (0.01, 0.99)).unwrap();
            if closed > 0.01 && closed < 0.99 {
                prop_assert!((est.alpha_hat - closed).abs() < 1e-8);
            } else {
                prop_assert!((est.alpha_hat - closed.clamp(0.01, 0.99)).abs() < 1e-8);
            }
        }
    }
}
