//! Closed-form stationary quantities of the AR(1)-ARCH(1) chain.

use serde::{Deserialize, Serialize};

use crate::chain::ModelParams;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryReport {
    /// `m(theta) = E_pi[F''(rho0, X_0, X_1)] = 2 m2`.
    pub m_theta: f64,
    pub m2: f64,
    pub m4: f64,
    pub sigma1_sq: f64,
    /// `sqrt(sigma1_sq) / m_theta`, the scale of the least-squares slope.
    pub tau: f64,
    /// Long-run variance of `F''(rho0, .) - m(theta)` from the AR(1)-in-`X^2` structure.
    pub sigma2_sq_lower: f64,
}

fn second_moment_gap(theta: &ModelParams) -> Result<f64> {
    let gap = 1.0 - theta.rho0 * theta.rho0 - theta.b0;
    if gap <= 0.0 {
        return Err(Error::ParameterDomain {
            name: "b0",
            reason: format!("need rho0^2 + b0 < 1, got {}", 1.0 - gap),
        });
    }
    Ok(gap)
}

/// `m(theta) = 2 a0 / (1 - rho0^2 - b0)`.
pub fn m_of_theta(theta: &ModelParams) -> Result<f64> {
    Ok(2.0 * theta.a0 / second_moment_gap(theta)?)
}

/// `E_pi[X^2]`.
pub fn m2(theta: &ModelParams) -> Result<f64> {
    Ok(theta.a0 / second_moment_gap(theta)?)
}

/// Stationary `(E X^2, E X^4)`.
///
/// `m4` is the fixed point of
/// `m4 = rho^4 m4 + 6 rho^2 (a m2 + b m4) + k (a^2 + 2ab m2 + b^2 m4)`
/// with `k = E[eps^4]`; it exists iff `1 - rho^4 - 6 rho^2 b - k b^2 > 0`.
/// Odd innovation moments are taken to vanish (symmetric laws).
pub fn stationary_moments(theta: &ModelParams) -> Result<(f64, f64)> {
    let m2 = m2(theta)?;
    let (r2, a, b) = (theta.rho0 * theta.rho0, theta.a0, theta.b0);
    let kurt = theta.innovation.fourth_moment();
    let denom = 1.0 - r2 * r2 - 6.0 * r2 * b - kurt * b * b;
    if denom <= 0.0 {
        return Err(Error::MomentCondition(format!(
            "1 - rho0^4 - 6 rho0^2 b0 - E[eps^4] b0^2 = {denom} <= 0"
        )));
    }
    let m4 = (6.0 * r2 * a * m2 + kurt * (a * a + 2.0 * a * b * m2)) / denom;
    Ok((m2, m4))
}

/// Long-run variance of `F'(rho0, X_{k-1}, X_k) = -2 X_{k-1} sigma(X_{k-1}) eps_k`,
/// i.e. `4 E_pi[X^2 sigma^2(X)] = 4 (a0 m2 + b0 m4)`.
pub fn sigma1_sq(theta: &ModelParams) -> Result<f64> {
    let (m2, m4) = stationary_moments(theta)?;
    let s = 4.0 * (theta.a0 * m2 + theta.b0 * m4);
    debug_assert!(s >= 4.0 * theta.a0 * m2);
    Ok(s)
}

/// `(v11, ratio)` where `v11 = Var_pi(2 X^2)` and consecutive covariances of
/// `2 X_k^2` decay geometrically with `ratio = rho0^2 + b0`.
pub fn sigma2_structure(theta: &ModelParams) -> Result<(f64, f64)> {
    let (m2, m4) = stationary_moments(theta)?;
    let v11 = 4.0 * (m4 - m2 * m2);
    let ratio = theta.rho0 * theta.rho0 + theta.b0;
    if v11 <= 0.0 {
        return Err(Error::Numerical(format!("non-positive v11 = {v11}")));
    }
    Ok((v11, ratio))
}

/// Covariance `v_{k,l}` of `2X_{k-1}^2` and `2X_{l-1}^2` under the stationary law.
pub fn sigma2_covariance(theta: &ModelParams, lag: usize) -> Result<f64> {
    let (v11, ratio) = sigma2_structure(theta)?;
    Ok(v11 * ratio.powi(lag as i32))
}

/// `v11 (1 + ratio) / (1 - ratio)`.
pub fn sigma2_sq(theta: &ModelParams) -> Result<f64> {
    let (v11, ratio) = sigma2_structure(theta)?;
    Ok(v11 * (1.0 + ratio) / (1.0 - ratio))
}

pub fn tau(theta: &ModelParams) -> Result<f64> {
    Ok(sigma1_sq(theta)?.sqrt() / m_of_theta(theta)?)
}

pub fn report(theta: &ModelParams) -> Result<TheoryReport> {
    let (m2, m4) = stationary_moments(theta)?;
    let m_theta = m_of_theta(theta)?;
    let sigma1_sq = sigma1_sq(theta)?;
    Ok(TheoryReport {
        m_theta,
        m2,
        m4,
        sigma1_sq,
        tau: sigma1_sq.sqrt() / m_theta,
        sigma2_sq_lower: sigma2_sq(theta)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{ParamBox, InnovationLaw, DEFAULT_GRID};
    use approx::assert_relative_eq;

    fn th(r: f64, a: f64, b: f64) -> ModelParams {
        ModelParams::new(r, a, b).unwrap()
    }

    #[test]
    fn m_of_theta_values() {
        assert_eq!(m_of_theta(&th(0.0, 1.0, 0.0)).unwrap(), 2.0);
        assert_eq!(m_of_theta(&th(0.5, 1.0, 0.25)).unwrap(), 4.0);
        assert_eq!(m_of_theta(&th(0.0, 3.0, 0.0)).unwrap(), 6.0);
    }

    #[test]
    fn moments() {
        assert_eq!(stationary_moments(&th(0.0, 1.0, 0.0)).unwrap(), (1.0, 3.0));
        let (m2, m4) = stationary_moments(&th(0.0, 1.0, 0.2)).unwrap();
        assert_relative_eq!(m2, 1.25, epsilon = 1e-15);
        assert_relative_eq!(m4, 4.5 / 0.88, epsilon = 1e-12);
        assert_relative_eq!(m4, 5.113636, epsilon = 1e-6);
        let (m2, _) = stationary_moments(&th(0.5, 1.0, 0.1)).unwrap();
        assert_relative_eq!(m2, 1.0 / 0.65, epsilon = 1e-15);
    }

    #[test]
    fn fourth_moment_condition_names_inequality() {
        // 3 b^2 = 0.75 with b = 0.5
        let err = stationary_moments(&th(0.3, 1.0, 0.6)).unwrap_err();
        assert!(matches!(err, Error::MomentCondition(ref s) if s.contains("rho0^4")));
    }

    #[test]
    fn sigma1_values() {
        assert_relative_eq!(sigma1_sq(&th(0.0, 1.0, 0.0)).unwrap(), 4.0);
        assert_relative_eq!(sigma1_sq(&th(0.0, 1.0, 0.2)).unwrap(), 4.0 * (1.25 + 0.2 * 4.5 / 0.88), epsilon = 1e-12);
        assert_relative_eq!(sigma1_sq(&th(0.0, 1.0, 0.2)).unwrap(), 9.090909, epsilon = 1e-6);
    }

    #[test]
    fn sigma2_values() {
        let (v11, ratio) = sigma2_structure(&th(0.0, 1.0, 0.0)).unwrap();
        assert_eq!((v11, ratio), (8.0, 0.0));
        assert_eq!(sigma2_sq(&th(0.0, 1.0, 0.0)).unwrap(), 8.0);
        let t = th(0.4, 0.7, 0.1);
        assert_eq!(sigma2_structure(&t).unwrap().1, 0.4 * 0.4 + 0.1);
        for lag in 0..5 {
            assert!(sigma2_covariance(&t, lag).unwrap() > 0.0);
        }
    }

    #[test]
    fn report_invariants_over_grid() {
        let bx = ParamBox::lattice(0.1, (0.5, 1.0), (0.01, 0.04), 7.0, InnovationLaw::StandardGaussian, DEFAULT_GRID).unwrap();
        for t in &bx.grid {
            let r = report(t).unwrap();
            assert_eq!(r.m_theta, 2.0 * r.m2);
            assert!(r.sigma1_sq >= 4.0 * t.a0 * r.m2);
            assert!(r.sigma1_sq >= 4.0 * bx.a_min * bx.a_min);
            assert_relative_eq!(r.tau, r.sigma1_sq.sqrt() / r.m_theta);
            assert!(r.tau > 0.0 && r.tau < 10.0);
            assert!(r.m4 > 0.0 && r.sigma2_sq_lower > 0.0);
        }
    }

    #[test]
    fn student_kurtosis_enters_m4() {
        let g = th(0.0, 1.0, 0.1);
        let s = ModelParams::with_innovation(0.0, 1.0, 0.1, InnovationLaw::ScaledStudent { df: 13 }).unwrap();
        assert!(stationary_moments(&s).unwrap().1 > stationary_moments(&g).unwrap().1);
    }
}
