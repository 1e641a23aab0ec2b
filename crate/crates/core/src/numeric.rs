//! Small numerical kernels shared by the modules: compensated summation,
//! adaptive Simpson quadrature and the batch-means long-run variance.

use crate::error::{Error, Result};

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = KahanSum::new();
        for v in iter {
            s.add(v);
        }
        s
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<KahanSum>().value()
}

pub fn compensated_mean(xs: &[f64]) -> f64 {
    compensated_sum(xs.iter().copied()) / xs.len() as f64
}

const MAX_DEPTH: u32 = 48;

/// Adaptive Simpson quadrature of `f` over consecutive panels delimited by
/// `breaks` (sorted ascending). The requested accuracy is
/// `max(abs_tol, rel_tol * |estimate|)`, split across panels by width.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> Result<f64> {
    if breaks.len() < 2 {
        return Err(Error::Numerical("quadrature needs at least one panel".into()));
    }
    // Coarse pass fixes the absolute target for the relative tolerance.
    let mut coarse = 0.0;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let m = 0.5 * (a + b);
        coarse += (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
    }
    let total_tol = abs_tol.max(rel_tol * coarse.abs());
    let span = breaks[breaks.len() - 1] - breaks[0];

    let mut total = KahanSum::new();
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let fa = f(a);
        let fm = f(0.5 * (a + b));
        let fb = f(b);
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        let tol = total_tol * (b - a) / span;
        let v = simpson_step(&f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)?;
        total.add(v);
    }
    let v = total.value();
    if !v.is_finite() {
        return Err(Error::Numerical("quadrature produced a non-finite value".into()));
    }
    Ok(v)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Numerical(format!(
            "adaptive Simpson did not reach tolerance {tol:e} on [{a}, {b}]"
        )));
    }
    let l = simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
    let r = simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
    Ok(l + r)
}

/// Panel boundaries for a density-weighted integral on `[-t, t]`: a dyadic
/// ladder `0, ±1/2, ±1, ±2, ...` plus any extra interior `kinks`.
pub fn symmetric_breaks(t: f64, kinks: &[f64]) -> Vec<f64> {
    let mut pos = vec![0.0];
    let mut r = 0.5;
    while r < t {
        pos.push(r);
        r *= 2.0;
    }
    pos.push(t);
    let mut all: Vec<f64> = pos.iter().map(|v| -v).chain(pos.iter().copied()).collect();
    all.extend(kinks.iter().copied().filter(|k| k.abs() < t));
    all.sort_by(|a, b| a.partial_cmp(b).unwrap());
    all.dedup();
    all
}

/// Long-run variance `lim Var(sum)/n` of a stationary sequence by
/// non-overlapping batch means. `batches` must be at least 2.
pub fn batch_means_variance(xs: &[f64], batches: usize) -> Result<f64> {
    if batches < 2 || xs.len() < 2 * batches {
        return Err(Error::Numerical(format!(
            "batch means needs >= 2 batches of >= 2 points (len {}, batches {batches})",
            xs.len()
        )));
    }
    let len = xs.len() / batches;
    let means: Vec<f64> = xs
        .chunks_exact(len)
        .take(batches)
        .map(compensated_mean)
        .collect();
    let grand = compensated_mean(&means);
    let ss = compensated_sum(means.iter().map(|m| (m - grand).powi(2)));
    Ok(len as f64 * ss / (batches as f64 - 1.0))
}
