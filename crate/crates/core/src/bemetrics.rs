//! Monte Carlo Berry-Esseen measurements: standardized samples of estimators
//! and additive functionals, exact Kolmogorov distances to the standard
//! normal, uniform sups over a parameter grid, rate fits and condition audits.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{simulate, ModelParams, ParamBox, Trajectory};
use crate::error::{Error, Result};
use crate::functional::AdditiveFunctional;
use crate::mest::{self, LeastSquaresAr};
use crate::numeric::compensated_mean;
use crate::rng::{derive_stream_seed, fold_key};
use crate::theory;

/// Standard normal distribution function.
pub fn gaussian_cdf(u: f64) -> f64 {
    0.5 * libm::erfc(-u / std::f64::consts::SQRT_2)
}

/// `sup_u |F_R(u) - Gamma(u)|` for an ascending sample.
pub fn ks_distance_sorted(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    let r = values.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &v) in values.iter().enumerate() {
        let g = gaussian_cdf(v);
        let hi = (i + 1) as f64 / r;
        let lo = i as f64 / r;
        d = d.max((hi - g).abs()).max((lo - g).abs());
    }
    Ok(d)
}

/// Exact Kolmogorov distance of an arbitrary (unsorted) sample.
pub fn ks_distance(values: &[f64]) -> Result<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    ks_distance_sorted(&v)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Estimator {
    /// Least-squares `rho_hat`.
    Rho,
    /// Two-step `b_hat` over `[b_min, b_max]`.
    B { b_min: f64, b_max: f64 },
}

impl Estimator {
    pub fn name(&self) -> &'static str {
        match self {
            Estimator::Rho => "rho",
            Estimator::B { .. } => "b",
        }
    }

    fn tag(&self) -> u64 {
        match *self {
            Estimator::Rho => 1,
            Estimator::B { b_min, b_max } => fold_key(&[2, b_min.to_bits(), b_max.to_bits()]),
        }
    }

    pub fn truth(&self, theta: &ModelParams) -> f64 {
        match self {
            Estimator::Rho => theta.rho0,
            Estimator::B { .. } => theta.b0,
        }
    }

    /// Estimate on one path.
    pub fn estimate(&self, traj: &Trajectory) -> Result<f64> {
        match *self {
            Estimator::Rho => mest::rho_hat(traj),
            Estimator::B { b_min, b_max } => {
                let r = mest::rho_hat(traj)?;
                let v = mest::tau_hat_sq(traj);
                Ok(mest::b_hat(traj, r, v, (b_min, b_max))?.alpha_hat)
            }
        }
    }

    /// `|M'_n(alpha_hat)|`: for `rho` the least-squares score at `rho_hat`,
    /// for `b` the score at the true plug-ins.
    pub fn score(&self, traj: &Trajectory, alpha_hat: f64) -> Result<f64> {
        match self {
            Estimator::Rho => Ok(mest::m_prime(&LeastSquaresAr::default(), traj, alpha_hat)?.abs()),
            Estimator::B { .. } => {
                let r = mest::rho_hat(traj)?;
                let v = mest::tau_hat_sq(traj);
                Ok(mest::v3_residual(traj, r, v, alpha_hat)?.abs())
            }
        }
    }
}

/// How a raw statistic is scaled before comparison with `Gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scale {
    /// `tau(theta)` for `rho_hat`, `sigma_1(theta)` for `F'`.
    Theory,
    /// Batch means on one stationary-ish path of `len` steps.
    BatchMeans { len: usize, batches: usize },
    Fixed { value: f64 },
}

/// Fraction of replications allowed to need a fallback seed.
pub const MAX_FALLBACK_FRACTION: f64 = 0.01;
const FALLBACK_TAG: u64 = 0xFA11_BACC;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizedSample {
    pub theta_id: String,
    pub n: usize,
    /// Ascending.
    pub values: Vec<f64>,
    pub replications: usize,
    pub master_seed: u64,
    pub scale: f64,
    pub fallbacks: usize,
}

pub const SAMPLE_CSV_HEADER: &str = "theta_id,n,rep,value";

impl StandardizedSample {
    pub fn kolmogorov_distance(&self) -> Result<f64> {
        ks_distance_sorted(&self.values)
    }

    pub fn mean(&self) -> f64 {
        compensated_mean(&self.values)
    }

    pub fn sd(&self) -> f64 {
        let m = self.mean();
        let ss: f64 = self.values.iter().map(|v| (v - m).powi(2)).sum();
        (ss / (self.values.len() as f64 - 1.0)).sqrt()
    }

    /// Rows are written in ascending order; `rep` is the rank.
    pub fn write_csv<W: Write>(&self, mut w: W, header: bool) -> Result<()> {
        if header {
            writeln!(w, "{SAMPLE_CSV_HEADER}")?;
        }
        for (i, v) in self.values.iter().enumerate() {
            writeln!(w, "{},{},{i},{v}", self.theta_id, self.n)?;
        }
        Ok(())
    }
}

pub fn kolmogorov_distance(sample: &StandardizedSample) -> Result<f64> {
    sample.kolmogorov_distance()
}

fn replication_key(master: u64, theta: &ModelParams, n: usize, tag: u64) -> u64 {
    fold_key(&[master, theta.key(), n as u64, tag])
}

/// Runs `stat` on `reps` independent paths. A replication that hits
/// degenerate data is retried once with a tagged fallback seed.
fn replicate<S>(theta: &ModelParams, n: usize, reps: usize, master: u64, tag: u64, stat: S) -> Result<(Vec<f64>, usize)>
where
    S: Fn(&Trajectory) -> Result<f64> + Sync,
{
    if reps == 0 {
        return Err(Error::EmptySample);
    }
    theta.validate()?;
    let key = replication_key(master, theta, n, tag);
    let fallback_key = fold_key(&[key, FALLBACK_TAG]);
    let out: Vec<Result<(f64, bool)>> = (0..reps as u64)
        .into_par_iter()
        .map(|rep| {
            let traj = simulate(theta, n, derive_stream_seed(key, rep))?;
            match stat(&traj) {
                Ok(v) => Ok((v, false)),
                Err(Error::DegenerateData(_)) => {
                    let traj = simulate(theta, n, derive_stream_seed(fallback_key, rep))?;
                    Ok((stat(&traj)?, true))
                }
                Err(e) => Err(e),
            }
        })
        .collect();
    let mut values = Vec::with_capacity(reps);
    let mut fallbacks = 0;
    for r in out {
        let (v, fb) = r?;
        values.push(v);
        fallbacks += fb as usize;
    }
    if fallbacks as f64 > MAX_FALLBACK_FRACTION * reps as f64 {
        return Err(Error::DataQuality { fallbacks, replications: reps });
    }
    Ok((values, fallbacks))
}

/// `alpha_hat - alpha_0` for each replication, in replication order.
pub fn estimator_errors(theta: &ModelParams, n: usize, reps: usize, master: u64, est: &Estimator) -> Result<(Vec<f64>, usize)> {
    let truth = est.truth(theta);
    replicate(theta, n, reps, master, est.tag(), |t| Ok(est.estimate(t)? - truth))
}

fn estimator_scale(theta: &ModelParams, est: &Estimator, scale: Scale) -> Result<f64> {
    match (scale, est) {
        (Scale::Fixed { value }, _) => Ok(value),
        (Scale::Theory, Estimator::Rho) => theory::tau(theta),
        (Scale::Theory, Estimator::B { .. }) => Err(Error::ParameterDomain {
            name: "scale",
            reason: "b_hat has no closed-form scale; calibrate it (see calibrate_b_scale)".into(),
        }),
        (Scale::BatchMeans { .. }, _) => Err(Error::ParameterDomain {
            name: "scale",
            reason: "batch-means scale applies to additive functionals only".into(),
        }),
    }
}

fn finish(theta: &ModelParams, n: usize, reps: usize, master: u64, mut values: Vec<f64>, scale: f64, fallbacks: usize) -> StandardizedSample {
    values.sort_by(f64::total_cmp);
    StandardizedSample { theta_id: theta.id(), n, values, replications: reps, master_seed: master, scale, fallbacks }
}

/// `sqrt(n) (alpha_hat - alpha_0) / scale` over `reps` replications, sorted.
pub fn standardized_estimator_sample(
    theta: &ModelParams,
    n: usize,
    reps: usize,
    master: u64,
    est: &Estimator,
    scale: Scale,
) -> Result<StandardizedSample> {
    let s = estimator_scale(theta, est, scale)?;
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::ParameterDomain { name: "scale", reason: format!("need a positive scale, got {s}") });
    }
    let (errs, fallbacks) = estimator_errors(theta, n, reps, master, est)?;
    let root_n = (n as f64).sqrt();
    let values = errs.into_iter().map(|e| root_n * e / s).collect();
    Ok(finish(theta, n, reps, master, values, s, fallbacks))
}

/// Sample standard deviation of `sqrt(n) (b_hat - b0)` at `n`; used as the
/// fixed scale for every `n` of a `b_hat` rate curve.
pub fn calibrate_scale(theta: &ModelParams, n: usize, reps: usize, master: u64, est: &Estimator) -> Result<f64> {
    let (errs, _) = estimator_errors(theta, n, reps, master, est)?;
    let root_n = (n as f64).sqrt();
    let xs: Vec<f64> = errs.iter().map(|e| root_n * e).collect();
    let m = compensated_mean(&xs);
    let ss: f64 = xs.iter().map(|x| (x - m).powi(2)).sum();
    Ok((ss / (xs.len() as f64 - 1.0)).sqrt())
}

fn additive_scale(theta: &ModelParams, f: AdditiveFunctional, scale: Scale, master: u64) -> Result<f64> {
    match scale {
        Scale::Fixed { value } => Ok(value),
        Scale::Theory => Ok(f.theory_variance(theta)?.sqrt()),
        Scale::BatchMeans { len, batches } => {
            let seed = fold_key(&[master, theta.key(), 0xBA7C_4EA5]);
            let path = simulate(theta, len, seed)?;
            Ok(f.batch_means_variance(&path, batches)?.sqrt())
        }
    }
}

/// `S_n / (sigma sqrt(n))` over `reps` replications, sorted. A zero scale
/// (the zero functional) leaves `S_n / sqrt(n)` unscaled.
pub fn standardized_additive_sample(
    theta: &ModelParams,
    n: usize,
    reps: usize,
    master: u64,
    f: AdditiveFunctional,
    scale: Scale,
) -> Result<StandardizedSample> {
    let s = additive_scale(theta, f, scale, master)?;
    let tag = fold_key(&[3, f as u64]);
    let (sums, fallbacks) = replicate(theta, n, reps, master, tag, |t| f.sum(t))?;
    let denom = if s > 0.0 { s * (n as f64).sqrt() } else { (n as f64).sqrt() };
    let values = sums.into_iter().map(|v| v / denom).collect();
    Ok(finish(theta, n, reps, master, values, s, fallbacks))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupDistance {
    pub sup: f64,
    pub argmax: String,
    pub per_theta: Vec<(String, f64)>,
}

/// `max_theta D_{n, theta}` over the box grid. `scale` is applied to every
/// grid point (use [`Scale::Theory`] for `rho_hat`).
pub fn uniform_sup_distance(bx: &ParamBox, n: usize, reps: usize, master: u64, est: &Estimator, scale: Scale) -> Result<SupDistance> {
    if bx.grid.is_empty() {
        return Err(Error::ParameterDomain { name: "grid", reason: "grid is empty".into() });
    }
    let mut per_theta = Vec::with_capacity(bx.grid.len());
    for theta in &bx.grid {
        let s = standardized_estimator_sample(theta, n, reps, master, est, scale)?;
        per_theta.push((theta.id(), s.kolmogorov_distance()?));
    }
    let (argmax, sup) = per_theta
        .iter()
        .fold((String::new(), f64::NEG_INFINITY), |acc, (id, d)| if *d > acc.1 { (id.clone(), *d) } else { acc });
    Ok(SupDistance { sup, argmax, per_theta })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Correction {
    None,
    /// Fit `log(D sqrt(n) / log n)` on `log n`; a `log n / sqrt(n)` rate gives slope 0.
    Log,
}

impl Correction {
    pub fn name(&self) -> &'static str {
        match self {
            Correction::None => "none",
            Correction::Log => "log",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeCurve {
    /// Theta id, or `"sup"` for the grid supremum.
    pub scope: String,
    pub estimator: String,
    pub replications: usize,
    pub points: Vec<(usize, f64)>,
    pub correction: Correction,
    pub slope: f64,
    pub intercept: f64,
}

pub const CURVE_CSV_HEADER: &str = "scope,estimator,n,R,D,slope,intercept,correction";

impl BeCurve {
    /// Sorts the points and fits the rate.
    pub fn new(scope: impl Into<String>, estimator: impl Into<String>, replications: usize, mut points: Vec<(usize, f64)>, correction: Correction) -> Result<Self> {
        points.sort_by_key(|p| p.0);
        let mut c = BeCurve { scope: scope.into(), estimator: estimator.into(), replications, points, correction, slope: f64::NAN, intercept: f64::NAN };
        let (slope, intercept) = rate_fit(&c)?;
        c.slope = slope;
        c.intercept = intercept;
        Ok(c)
    }

    /// `max / min` of `sqrt(n) D_n`.
    pub fn stability_ratio(&self) -> f64 {
        let scaled: Vec<f64> = self.points.iter().map(|&(n, d)| (n as f64).sqrt() * d).collect();
        let max = scaled.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
        max / min
    }

    pub fn write_csv<W: Write>(&self, mut w: W, header: bool) -> Result<()> {
        if header {
            writeln!(w, "{CURVE_CSV_HEADER}")?;
        }
        for &(n, d) in &self.points {
            writeln!(
                w,
                "{},{},{n},{},{d},{},{},{}",
                self.scope,
                self.estimator,
                self.replications,
                self.slope,
                self.intercept,
                self.correction.name()
            )?;
        }
        Ok(())
    }
}

/// Least-squares line through `log D_n` (or `log(D_n sqrt(n) / log n)`)
/// against `log n`.
pub fn rate_fit(curve: &BeCurve) -> Result<(f64, f64)> {
    if curve.points.len() < 3 {
        return Err(Error::DegenerateFit(format!("need >= 3 points, got {}", curve.points.len())));
    }
    let mut xs = Vec::with_capacity(curve.points.len());
    let mut ys = Vec::with_capacity(curve.points.len());
    for &(n, d) in &curve.points {
        if !(d > 0.0) {
            return Err(Error::DegenerateFit(format!("D = {d} at n = {n}; increase the replication count")));
        }
        let ln_n = (n as f64).ln();
        xs.push(ln_n);
        ys.push(match curve.correction {
            Correction::None => d.ln(),
            Correction::Log => (d * (n as f64).sqrt() / ln_n).ln(),
        });
    }
    let mx = compensated_mean(&xs);
    let my = compensated_mean(&ys);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("all n are equal".into()));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Which statistic a curve measures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "target", rename_all = "snake_case")]
pub enum CurveTarget {
    Estimator { estimator: Estimator },
    Additive { functional: AdditiveFunctional },
}

/// `D_n` for every `n` of `ladder` at one `theta`. `b_hat` curves are
/// self-normalized by the sample standard deviation at the largest `n`.
pub fn be_curve(theta: &ModelParams, ladder: &[usize], reps: usize, master: u64, target: CurveTarget, correction: Correction) -> Result<BeCurve> {
    let (name, points) = match target {
        CurveTarget::Estimator { estimator } => {
            let scale = curve_scale(theta, ladder, reps, master, &estimator)?;
            let mut pts = Vec::with_capacity(ladder.len());
            for &n in ladder {
                let s = standardized_estimator_sample(theta, n, reps, master, &estimator, scale)?;
                pts.push((n, s.kolmogorov_distance()?));
            }
            (estimator.name(), pts)
        }
        CurveTarget::Additive { functional } => {
            let scale = match functional {
                AdditiveFunctional::FsecondCentered => Scale::BatchMeans { len: 1_000_000, batches: 1000 },
                _ => Scale::Theory,
            };
            let mut pts = Vec::with_capacity(ladder.len());
            for &n in ladder {
                let s = standardized_additive_sample(theta, n, reps, master, functional, scale)?;
                pts.push((n, s.kolmogorov_distance()?));
            }
            (functional.name(), pts)
        }
    };
    BeCurve::new(theta.id(), name, reps, points, correction)
}

fn curve_scale(theta: &ModelParams, ladder: &[usize], reps: usize, master: u64, est: &Estimator) -> Result<Scale> {
    Ok(match est {
        Estimator::Rho => Scale::Theory,
        Estimator::B { .. } => {
            let n_max = *ladder.iter().max().ok_or(Error::EmptySample)?;
            Scale::Fixed { value: calibrate_scale(theta, n_max, reps, master, est)? }
        }
    })
}

/// Curve of `sup_theta D_{n, theta}` over the box grid. For `b_hat` each grid
/// point gets its own calibrated scale.
pub fn be_curve_sup(bx: &ParamBox, ladder: &[usize], reps: usize, master: u64, est: &Estimator, correction: Correction) -> Result<BeCurve> {
    let scales: Vec<Scale> = bx.grid.iter().map(|t| curve_scale(t, ladder, reps, master, est)).collect::<Result<_>>()?;
    let mut points = Vec::with_capacity(ladder.len());
    for &n in ladder {
        let mut sup: f64 = 0.0;
        for (theta, &scale) in bx.grid.iter().zip(&scales) {
            let s = standardized_estimator_sample(theta, n, reps, master, est, scale)?;
            sup = sup.max(s.kolmogorov_distance()?);
        }
        points.push((n, sup));
    }
    BeCurve::new("sup", est.name(), reps, points, correction)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionAudit {
    /// Fraction of replications with `|M'_n(alpha_hat)| >= r_n`.
    pub v3_freq: f64,
    /// Fraction with `|alpha_hat - alpha_0| >= d`.
    pub v6_freq: f64,
    pub r_n_used: f64,
    pub d_used: f64,
}

/// Threshold used for `rho_hat` when `r_n = 0`.
pub const EXACT_SCORE_THRESHOLD: f64 = 1e-9;

pub fn audit_conditions(theta: &ModelParams, n: usize, reps: usize, master: u64, est: &Estimator, r_n: f64, d: f64) -> Result<ConditionAudit> {
    let r_n_used = if r_n > 0.0 {
        r_n
    } else if matches!(est, Estimator::Rho) {
        EXACT_SCORE_THRESHOLD
    } else {
        return Err(Error::ParameterDomain { name: "r_n", reason: "b_hat needs r_n > 0".into() });
    };
    let truth = est.truth(theta);
    // encode both indicators in one replication statistic
    let (codes, _) = replicate(theta, n, reps, master, est.tag(), |t| {
        let a = est.estimate(t)?;
        let v3 = est.score(t, a)? >= r_n_used;
        let v6 = (a - truth).abs() >= d;
        Ok(v3 as u8 as f64 + 2.0 * v6 as u8 as f64)
    })?;
    let r = codes.len() as f64;
    let v3 = codes.iter().filter(|&&c| c == 1.0 || c == 3.0).count() as f64 / r;
    let v6 = codes.iter().filter(|&&c| c >= 2.0).count() as f64 / r;
    Ok(ConditionAudit { v3_freq: v3, v6_freq: v6, r_n_used, d_used: d })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_values() {
        assert_eq!(gaussian_cdf(0.0), 0.5);
        assert!((gaussian_cdf(1.959964) - 0.975).abs() < 1e-6);
        let g = gaussian_cdf(-1.0);
        assert!((g - 0.158_655_253_931_457_05).abs() < 1e-15, "{g}");
        let mut u = -8.0;
        while u < 8.0 {
            assert!((gaussian_cdf(-u) - (1.0 - gaussian_cdf(u))).abs() < 1e-12);
            u += 0.0016;
        }
    }

    #[test]
    fn ks_hand_values() {
        assert_eq!(ks_distance(&[0.0]).unwrap(), 0.5);
        // Gamma(-1) = 0.158655, so |1/3 - 0.158655| = 0.174678
        assert!((ks_distance(&[1.0, -1.0, 0.0]).unwrap() - 0.174_678).abs() < 1e-6);
        assert!(matches!(ks_distance(&[]), Err(Error::EmptySample)));
    }

    #[test]
    fn rate_fit_exact_laws() {
        let ladder = [250usize, 500, 1000, 2000, 4000, 8000];
        let pts: Vec<_> = ladder.iter().map(|&n| (n, 0.8 / (n as f64).sqrt())).collect();
        let c = BeCurve::new("t", "rho", 1, pts, Correction::None).unwrap();
        assert!((c.slope + 0.5).abs() < 1e-12);
        assert!((c.intercept - 0.8f64.ln()).abs() < 1e-12);
        assert!((c.stability_ratio() - 1.0).abs() < 1e-12);

        let pts: Vec<_> = ladder.iter().map(|&n| (n, 0.8 * (n as f64).ln() / (n as f64).sqrt())).collect();
        let c = BeCurve::new("t", "b", 1, pts, Correction::Log).unwrap();
        assert!(c.slope.abs() < 1e-12);
    }

    #[test]
    fn rate_fit_errors() {
        assert!(matches!(BeCurve::new("t", "rho", 1, vec![(1, 0.1), (2, 0.1)], Correction::None), Err(Error::DegenerateFit(_))));
        assert!(matches!(BeCurve::new("t", "rho", 1, vec![(1, 0.1), (2, 0.0), (4, 0.1)], Correction::None), Err(Error::DegenerateFit(_))));
    }

    #[test]
    fn curve_csv() {
        let c = BeCurve::new("sup", "rho", 10, vec![(100, 0.1), (400, 0.05), (1600, 0.025)], Correction::None).unwrap();
        let mut buf = Vec::new();
        c.write_csv(&mut buf, true).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let mut lines = s.lines();
        assert_eq!(lines.next().unwrap(), CURVE_CSV_HEADER);
        assert!(lines.next().unwrap().starts_with("sup,rho,100,10,0.1,-0.5"));
        assert_eq!(s.lines().count(), 4);
    }

    #[test]
    fn zero_functional_is_point_mass() {
        let theta = ModelParams::new(0.0, 1.0, 0.0).unwrap();
        let s = standardized_additive_sample(&theta, 50, 40, 1, AdditiveFunctional::Zero, Scale::Theory).unwrap();
        assert!(s.values.iter().all(|&v| v == 0.0));
        assert_eq!(s.kolmogorov_distance().unwrap(), 0.5);
    }

    #[test]
    fn samples_are_deterministic_and_sorted() {
        let theta = ModelParams::new(0.2, 1.0, 0.1).unwrap();
        let a = standardized_estimator_sample(&theta, 200, 100, 9, &Estimator::Rho, Scale::Theory).unwrap();
        let b = standardized_estimator_sample(&theta, 200, 100, 9, &Estimator::Rho, Scale::Theory).unwrap();
        assert_eq!(a, b);
        assert!(a.values.windows(2).all(|w| w[0] <= w[1]));
        let c = standardized_estimator_sample(&theta, 200, 100, 10, &Estimator::Rho, Scale::Theory).unwrap();
        assert_ne!(a.values, c.values);
    }

    #[test]
    fn theory_scale_is_rejected_for_b() {
        let theta = ModelParams::new(0.2, 1.0, 0.1).unwrap();
        let est = Estimator::B { b_min: 0.01, b_max: 0.9 };
        assert!(standardized_estimator_sample(&theta, 200, 10, 9, &est, Scale::Theory).is_err());
    }

    #[test]
    fn singleton_sup_is_member_distance() {
        let theta = ModelParams::new(0.05, 0.7, 0.02).unwrap();
        let bx = ParamBox::lattice(0.1, (0.5, 1.0), (0.01, 0.04), 7.0, Default::default(), [1, 1, 1])
            .unwrap()
            .with_grid(vec![theta])
            .unwrap();
        let sup = uniform_sup_distance(&bx, 300, 200, 4, &Estimator::Rho, Scale::Theory).unwrap();
        let d = standardized_estimator_sample(&theta, 300, 200, 4, &Estimator::Rho, Scale::Theory).unwrap().kolmogorov_distance().unwrap();
        assert_eq!(sup.sup, d);
        assert_eq!(sup.argmax, theta.id());
    }

    #[test]
    fn rho_audit_has_exact_first_order_condition() {
        let theta = ModelParams::new(0.3, 1.0, 0.1).unwrap();
        let a = audit_conditions(&theta, 500, 200, 3, &Estimator::Rho, 0.0, 0.25).unwrap();
        assert_eq!(a.v3_freq, 0.0);
        assert_eq!(a.r_n_used, EXACT_SCORE_THRESHOLD);
    }

    fn normal_quantile(q: f64) -> f64 {
        use statrs::distribution::{ContinuousCDF, Normal};
        Normal::standard().inverse_cdf(q)
    }

    #[test]
    fn mid_quantiles_hit_half_step() {
        for r in [1usize, 7, 100, 1000] {
            let v: Vec<f64> = (1..=r).map(|i| normal_quantile((i as f64 - 0.5) / r as f64)).collect();
            let d = ks_distance_sorted(&v).unwrap();
            assert!((d - 0.5 / r as f64).abs() < 1e-9, "r={r} d={d}");
        }
    }

    proptest::proptest! {
        #[test]
        fn duplication_invariance(v in proptest::collection::vec(-4.0f64..4.0, 1..60), k in 2usize..6) {
            let d = ks_distance(&v).unwrap();
            let dup: Vec<f64> = v.iter().flat_map(|&x| std::iter::repeat_n(x, k)).collect();
            proptest::prop_assert!((ks_distance(&dup).unwrap() - d).abs() <= 1e-15);
        }

        #[test]
        fn median_insertion_costs_at_most_one_step(v in proptest::collection::vec(-4.0f64..4.0, 1..60)) {
            let d = ks_distance(&v).unwrap();
            let mut w = v.clone();
            w.push(0.0);
            proptest::prop_assert!(ks_distance(&w).unwrap() <= d + 1.0 / v.len() as f64);
        }
    }

    #[test]
    fn standardized_rho_is_centered_with_unit_sd() {
        let theta = ModelParams::new(0.0, 1.0, 0.0).unwrap();
        for n in [4000usize, 8000] {
            let s = standardized_estimator_sample(&theta, n, 2000, 11, &Estimator::Rho, Scale::Theory).unwrap();
            let sd = s.sd();
            assert!(s.mean().abs() <= 3.0 / (2000f64).sqrt() * sd, "n={n} mean={}", s.mean());
            assert!((sd - 1.0).abs() <= 0.1, "n={n} sd={sd}");
        }
    }

    #[test]
    fn additive_sums_are_centered() {
        let theta = ModelParams::new(0.3, 1.0, 0.1).unwrap();
        let s = standardized_additive_sample(&theta, 2000, 1000, 5, AdditiveFunctional::Fprime, Scale::Theory).unwrap();
        // values are S_n / (sigma sqrt(n)); their mean has standard error sd / sqrt(R)
        assert!(s.mean().abs() <= 3.0 * s.sd() / (1000f64).sqrt());
    }

    #[test]
    fn sample_csv_rows() {
        let theta = ModelParams::new(0.0, 1.0, 0.0).unwrap();
        let s = standardized_estimator_sample(&theta, 50, 5, 1, &Estimator::Rho, Scale::Theory).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf, true).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), SAMPLE_CSV_HEADER);
        assert!(text.lines().nth(1).unwrap().starts_with("rho0_a1_b0,50,0,"));
        assert_eq!(text.lines().count(), 6);
    }
}
