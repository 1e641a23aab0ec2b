//! Numerical audit of the drift condition `Q V <= varrho V + varsigma 1_S`
//! with `V(x) = (1 + |x|)^p`, and of the minorization on `S = [-s, s]`.

use serde::{Deserialize, Serialize};

use super::{InnovationLaw, ModelParams, ParamBox};
use crate::error::Result;
use crate::numeric::{integrate, symmetric_breaks};

/// Candidate small-set radii, tried in increasing order.
pub const DEFAULT_S_LADDER: [f64; 6] = [1.0, 2.0, 5.0, 10.0, 20.0, 50.0];

const IOTA_ABS_TOL: f64 = 1e-8;
const QV_REL_TOL: f64 = 1e-9;
const X_MAX: f64 = 1e4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DriftVerdict {
    pub iota_ok: bool,
    pub drift_ok: bool,
    pub minorization_ok: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    pub iota: f64,
    /// Contraction factor, `(iota + 1) / 2`.
    pub varrho: f64,
    /// Small-set radius; `None` when no radius on the ladder works.
    pub s: Option<f64>,
    pub varsigma: Option<f64>,
    pub minorization_mass: f64,
    pub verdict: DriftVerdict,
}

fn weighted_power_integral(law: InnovationLaw, p: f64, shift: f64, scale: f64) -> Result<f64> {
    // int (1 + |shift + scale*y|)^p f(y) dy; the kink sits at y = -shift/scale
    let t = law.truncation(p)?;
    let kink = -shift / scale;
    let br = symmetric_breaks(t, &[kink]);
    integrate(
        |y| (1.0 + (shift + scale * y).abs()).powf(p) * law.density(y),
        &br,
        0.0,
        QV_REL_TOL,
    )
}

/// `iota = (rho_bar + sqrt(b_max))^p * int (1 + |y|)^p f(y) dy`.
pub fn check_iota(bx: &ParamBox) -> Result<f64> {
    let law = bx.innovation;
    let t = law.truncation(bx.p)?;
    let br = symmetric_breaks(t, &[]);
    let moment = integrate(
        |y| (1.0 + y.abs()).powf(bx.p) * law.density(y),
        &br,
        IOTA_ABS_TOL,
        0.0,
    )?;
    Ok((bx.rho_bar + bx.b_max.sqrt()).powf(bx.p) * moment)
}

/// `Q_theta V(x)` for `V(x) = (1 + |x|)^p`.
pub fn lyapunov_image(theta: &ModelParams, p: f64, x: f64) -> Result<f64> {
    weighted_power_integral(theta.innovation, p, theta.rho0 * x, theta.sigma(x))
}

/// `Q_theta V(x) / V(x)`.
pub fn lyapunov_ratio(theta: &ModelParams, p: f64, x: f64) -> Result<f64> {
    Ok(lyapunov_image(theta, p, x)? / (1.0 + x.abs()).powf(p))
}

/// Box-uniform upper bound
/// `int ((1 + rho_bar|x| + (sqrt(a_max) + sqrt(b_max)|x|)|y|) / (1 + |x|))^p f(y) dy`
/// on the Lyapunov ratio; its limit as `|x| -> inf` is at most `iota`.
pub fn lyapunov_ratio_bound(bx: &ParamBox, x: f64) -> Result<f64> {
    let ax = x.abs();
    let shift = 1.0 + bx.rho_bar * ax;
    let scale = bx.a_max.sqrt() + bx.b_max.sqrt() * ax;
    let law = bx.innovation;
    let t = law.truncation(bx.p)?;
    let br = symmetric_breaks(t, &[]);
    let v = integrate(
        |y| (shift + scale * y.abs()).powf(bx.p) * law.density(y),
        &br,
        0.0,
        QV_REL_TOL,
    )?;
    Ok(v / (1.0 + ax).powf(bx.p))
}

fn outer_x_grid() -> Vec<f64> {
    let mut xs = Vec::new();
    let mut x: f64 = 0.5;
    while x < X_MAX {
        xs.push(x);
        x *= 1.15;
    }
    xs.push(X_MAX);
    xs
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

/// Drift and minorization audit over every grid point of the box.
///
/// Returns a failing report (not an error) when `iota >= 1` or when no radius
/// on `s_ladder` achieves `sup_{|x| >= s, theta} QV/V <= varrho`.
pub fn check_drift(bx: &ParamBox, s_ladder: &[f64]) -> Result<DriftReport> {
    bx.validate()?;
    let iota = check_iota(bx)?;
    let varrho = (iota + 1.0) / 2.0;
    let mut report = DriftReport {
        iota,
        varrho,
        s: None,
        varsigma: None,
        minorization_mass: 0.0,
        verdict: DriftVerdict { iota_ok: iota < 1.0, drift_ok: false, minorization_ok: false, pass: false },
    };
    if iota >= 1.0 {
        return Ok(report);
    }

    // sup over theta of QV/V at each |x| on the outer grid, both signs
    let xs = outer_x_grid();
    let mut sup_ratio = Vec::with_capacity(xs.len());
    for &x in &xs {
        let mut m: f64 = 0.0;
        for theta in &bx.grid {
            m = m.max(lyapunov_ratio(theta, bx.p, x)?);
            m = m.max(lyapunov_ratio(theta, bx.p, -x)?);
        }
        sup_ratio.push(m);
    }

    let mut ladder: Vec<f64> = s_ladder.to_vec();
    ladder.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let s = ladder.into_iter().find(|&s| {
        xs.iter()
            .zip(&sup_ratio)
            .filter(|(x, _)| **x >= s)
            .all(|(_, r)| *r <= varrho)
    });
    let Some(s) = s else {
        return Ok(report);
    };
    report.s = Some(s);

    let mut varsigma: f64 = 0.0;
    for x in linspace(-s, s, 41) {
        for theta in &bx.grid {
            varsigma = varsigma.max(lyapunov_image(theta, bx.p, x)?);
        }
    }
    report.varsigma = Some(varsigma);
    report.verdict.drift_ok = varsigma.is_finite();

    report.minorization_mass = minorization_mass(bx, s);
    report.verdict.minorization_ok = report.minorization_mass > 0.0;
    report.verdict.pass = report.verdict.iota_ok && report.verdict.drift_ok && report.verdict.minorization_ok;
    Ok(report)
}

/// `int_S inf_{x in S, theta} q_theta(x, u) du`, the mass of the minorizing
/// measure, with the infimum taken over a grid of `x` and the box grid.
pub fn minorization_mass(bx: &ParamBox, s: f64) -> f64 {
    let xs: Vec<f64> = linspace(-s, s, 81).collect();
    let us: Vec<f64> = linspace(-s, s, 401).collect();
    let du = 2.0 * s / (us.len() - 1) as f64;
    let lower: Vec<f64> = us
        .iter()
        .map(|&u| {
            let mut m = f64::INFINITY;
            for theta in &bx.grid {
                for &x in &xs {
                    m = m.min(theta.transition_density(x, u));
                }
            }
            m
        })
        .collect();
    // trapezoid rule
    let inner: f64 = lower[1..lower.len() - 1].iter().sum();
    du * (inner + 0.5 * (lower[0] + lower[lower.len() - 1]))
}
