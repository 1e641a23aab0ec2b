//! Discretized Fourier kernels `K(t)(x, dy) = exp(i t xi(x, y)) Q(x, dy)` on a
//! truncated grid, their dominant eigenvalue `lambda(t)`, and the asymptotic
//! variance read off as `-lambda''(0)`.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chain::ModelParams;
use crate::error::{Error, Result};
use crate::theory;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub half_width: f64,
    pub nodes: usize,
}

impl GridSpec {
    pub fn new(half_width: f64, nodes: usize) -> Result<Self> {
        if nodes < 3 || nodes.is_multiple_of(2) {
            return Err(Error::ParameterDomain { name: "nodes", reason: format!("need an odd node count >= 3, got {nodes}") });
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::ParameterDomain { name: "half_width", reason: format!("need L > 0, got {half_width}") });
        }
        Ok(GridSpec { half_width, nodes })
    }

    /// `L = 12 sqrt(E_pi X^2)`, spacing at most `sqrt(a0) / 8`.
    pub fn default_for(theta: &ModelParams) -> Result<Self> {
        let l = 12.0 * theory::m2(theta)?.sqrt();
        let dx = theta.a0.sqrt() / 8.0;
        let half = (l / dx).ceil() as usize;
        GridSpec::new(l, 2 * half + 1)
    }

    /// Twice the width at the same spacing.
    pub fn doubled(&self) -> Self {
        GridSpec { half_width: 2.0 * self.half_width, nodes: 2 * self.nodes - 1 }
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.nodes - 1) as f64
    }

    pub fn points(&self) -> Vec<f64> {
        let h = self.spacing();
        let c = (self.nodes / 2) as isize;
        (0..self.nodes).map(|i| (i as isize - c) as f64 * h).collect()
    }

    /// Trapezoid weights; they sum to `2L`.
    pub fn weights(&self) -> Vec<f64> {
        let h = self.spacing();
        let mut w = vec![h; self.nodes];
        w[0] = 0.5 * h;
        w[self.nodes - 1] = 0.5 * h;
        w
    }

    pub fn center(&self) -> usize {
        self.nodes / 2
    }
}

/// Row-major `N x N` complex kernel at frequency `t`. Rows are rescaled so
/// the `t = 0` kernel is exactly row-stochastic; the same scaling is used for
/// every `t`.
#[derive(Debug, Clone)]
pub struct FourierOperator {
    pub n: usize,
    pub t: f64,
    pub matrix: Vec<Complex64>,
    pub row_renormalized: bool,
}

impl FourierOperator {
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[i * self.n + j]
    }

    pub fn apply(&self, v: &[Complex64], out: &mut [Complex64]) {
        for (row, o) in self.matrix.chunks_exact(self.n).zip(out.iter_mut()) {
            *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
    }

    /// `e_start^T K(t)^steps 1`, the characteristic function of `S_steps`
    /// for the chain started at node `start`.
    pub fn start_row_power(&self, start: usize, steps: usize) -> Complex64 {
        let mut v = vec![Complex64::new(1.0, 0.0); self.n];
        let mut w = vec![Complex64::new(0.0, 0.0); self.n];
        for _ in 0..steps {
            self.apply(&v, &mut w);
            std::mem::swap(&mut v, &mut w);
        }
        v[start]
    }

    /// Debug dump: 16-byte little-endian header `N: u64, t: f64`, then
    /// row-major `(re, im)` pairs of `f64`.
    pub fn write_dump<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&(self.n as u64).to_le_bytes())?;
        w.write_all(&self.t.to_le_bytes())?;
        for z in &self.matrix {
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
        Ok(())
    }
}

pub fn build_operator<F>(theta: &ModelParams, xi: F, t: f64, grid: &GridSpec) -> Result<FourierOperator>
where
    F: Fn(f64, f64) -> f64,
{
    let xs = grid.points();
    let ws = grid.weights();
    let n = grid.nodes;
    let mut matrix = Vec::with_capacity(n * n);
    for &x in &xs {
        let base: Vec<f64> = xs.iter().zip(&ws).map(|(&y, &w)| theta.transition_density(x, y) * w).collect();
        let total: f64 = base.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::Numerical(format!("kernel row at x = {x} has mass {total}")));
        }
        for (&y, &b) in xs.iter().zip(&base) {
            let phase = t * xi(x, y);
            if !phase.is_finite() {
                return Err(Error::NonFinite { alpha: x });
            }
            matrix.push(Complex64::from_polar(b / total, phase));
        }
    }
    Ok(FourierOperator { n, t, matrix, row_renormalized: true })
}

pub const DEFAULT_EIG_TOL: f64 = 1e-12;
pub const MAX_POWER_ITER: usize = 20_000;

/// Power iteration from the all-ones vector; stops when successive
/// Rayleigh quotients differ by less than `tol` and the eigen-residual
/// `|Kv - lambda v|` is below `sqrt(tol)`.
pub fn power_iteration<M>(n: usize, matvec: M, tol: f64) -> Result<Complex64>
where
    M: Fn(&[Complex64], &mut [Complex64]),
{
    let mut v = vec![Complex64::new(1.0 / (n as f64).sqrt(), 0.0); n];
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    let mut lambda = Complex64::new(f64::NAN, 0.0);
    let mut last_change = f64::INFINITY;
    for _ in 0..MAX_POWER_ITER {
        matvec(&v, &mut w);
        // v is unit-norm, so the Rayleigh quotient is v^H K v
        let next: Complex64 = v.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
        let residual = v.iter().zip(&w).map(|(a, b)| (b - next * a).norm_sqr()).sum::<f64>().sqrt();
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Numerical(format!("power iteration norm {norm}")));
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / norm;
        }
        last_change = (next - lambda).norm();
        lambda = next;
        if last_change < tol && residual < tol.sqrt() * lambda.norm().max(1.0) {
            return Ok(lambda);
        }
    }
    Err(Error::GapFailure { iterations: MAX_POWER_ITER, last_change })
}

pub fn dominant_eigenvalue(op: &FourierOperator, tol: f64) -> Result<Complex64> {
    power_iteration(op.n, |v, out| op.apply(v, out), tol)
}

/// Dominant eigenvalue of an arbitrary row-major square matrix.
pub fn dominant_eigenvalue_dense(matrix: &[Complex64], n: usize, tol: f64) -> Result<Complex64> {
    assert_eq!(matrix.len(), n * n);
    power_iteration(
        n,
        |v, out| {
            for (row, o) in matrix.chunks_exact(n).zip(out.iter_mut()) {
                *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
            }
        },
        tol,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub lambda0: Complex64,
    pub lambda_prime0: Complex64,
    /// `-Re lambda''(0)` by the 5-point central stencil.
    pub sigma_sq: f64,
    pub t_step: f64,
    pub grid: GridSpec,
    /// `sigma_sq` recomputed on the doubled grid.
    pub sigma_sq_doubled: f64,
    /// `|sigma_sq_doubled - sigma_sq| / sigma_sq < 2%`.
    pub converged: bool,
}

pub const GRID_DOUBLING_TOL: f64 = 0.02;

fn stencil<F>(theta: &ModelParams, xi: F, grid: &GridSpec, h: f64) -> Result<(Complex64, Complex64, f64)>
where
    F: Fn(f64, f64) -> f64 + Copy,
{
    let mut lam = [Complex64::new(0.0, 0.0); 5];
    for (k, m) in [-2.0, -1.0, 0.0, 1.0, 2.0].iter().enumerate() {
        let op = build_operator(theta, xi, m * h, grid)?;
        lam[k] = dominant_eigenvalue(&op, DEFAULT_EIG_TOL)?;
    }
    let [l_m2, l_m1, l0, l_p1, l_p2] = lam;
    let d1 = (l_m2 - 8.0 * l_m1 + 8.0 * l_p1 - l_p2) / (12.0 * h);
    let d2 = (-l_m2 + 16.0 * l_m1 - 30.0 * l0 + 16.0 * l_p1 - l_p2) / (12.0 * h * h);
    Ok((l0, d1, -d2.re))
}

/// `lambda(0)`, `lambda'(0)` and `-lambda''(0)` from the stencil
/// `t in {-2h, -h, 0, h, 2h}`, plus the grid-doubling check. `xi` must be
/// centered under the stationary law.
pub fn spectral_report<F>(theta: &ModelParams, xi: F, grid: &GridSpec, t_step: f64) -> Result<SpectralReport>
where
    F: Fn(f64, f64) -> f64 + Copy,
{
    if !(t_step > 0.0) {
        return Err(Error::ParameterDomain { name: "t_step", reason: format!("need h > 0, got {t_step}") });
    }
    let (lambda0, lambda_prime0, sigma_sq) = stencil(theta, xi, grid, t_step)?;
    let doubled = grid.doubled();
    let (_, _, sigma_sq_doubled) = stencil(theta, xi, &doubled, t_step)?;
    let converged = (sigma_sq_doubled - sigma_sq).abs() < GRID_DOUBLING_TOL * sigma_sq.abs();
    Ok(SpectralReport { lambda0, lambda_prime0, sigma_sq, t_step, grid: *grid, sigma_sq_doubled, converged })
}

/// [`spectral_report`] with `h = 0.01 / sqrt(sigma^2)`, where the variance
/// estimate comes from a first pass at `h = 0.01`.
pub fn spectral_report_auto<F>(theta: &ModelParams, xi: F, grid: &GridSpec) -> Result<SpectralReport>
where
    F: Fn(f64, f64) -> f64 + Copy,
{
    let (_, _, first) = stencil(theta, xi, grid, 1e-2)?;
    let h = if first > 0.0 { 1e-2 / first.sqrt() } else { 1e-2 };
    spectral_report(theta, xi, grid, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functional::AdditiveFunctional;

    fn th(r: f64, a: f64, b: f64) -> ModelParams {
        ModelParams::new(r, a, b).unwrap()
    }

    #[test]
    fn grid_spec_invariants() {
        assert!(GridSpec::new(5.0, 4).is_err());
        assert!(GridSpec::new(5.0, 1).is_err());
        let g = GridSpec::new(5.0, 11).unwrap();
        assert!((g.weights().iter().sum::<f64>() - 10.0).abs() < 1e-12);
        assert_eq!(g.points()[g.center()], 0.0);
        let d = g.doubled();
        assert_eq!(d.nodes, 21);
        assert!((d.spacing() - g.spacing()).abs() < 1e-15);
    }

    #[test]
    fn operator_rows_and_moduli() {
        let theta = th(0.3, 1.0, 0.1);
        let grid = GridSpec::new(8.0, 61).unwrap();
        let xi = AdditiveFunctional::Fprime.evaluator(&theta).unwrap();
        let k0 = build_operator(&theta, xi, 0.0, &grid).unwrap();
        for i in 0..k0.n {
            let s: Complex64 = (0..k0.n).map(|j| k0.entry(i, j)).sum();
            assert!((s - 1.0).norm() < 1e-14);
        }
        let kt = build_operator(&theta, xi, 0.37, &grid).unwrap();
        for (a, b) in kt.matrix.iter().zip(&k0.matrix) {
            assert!((a.norm() - b.re).abs() < 1e-15);
        }
        let zero = AdditiveFunctional::Zero.evaluator(&theta).unwrap();
        let kz = build_operator(&theta, zero, 0.9, &grid).unwrap();
        assert_eq!(kz.matrix, k0.matrix);
        let lam = dominant_eigenvalue(&k0, DEFAULT_EIG_TOL).unwrap();
        assert!((lam - 1.0).norm() < 1e-12);
    }

    #[test]
    fn hand_matrix() {
        let m: Vec<Complex64> = [0.9, 0.1, 0.2, 0.8].iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let lam = dominant_eigenvalue_dense(&m, 2, 1e-13).unwrap();
        assert!((lam - 1.0).norm() < 1e-12);
        // the trace 1.7 pins the other eigenvalue at 0.7
        assert!((1.7 - lam.re - 0.7).abs() < 1e-12);
    }

    #[test]
    fn rotation_has_no_dominant_eigenvalue() {
        // eigenvalues +-i have equal modulus
        let z = Complex64::new(0.0, 0.0);
        let o = Complex64::new(1.0, 0.0);
        let m = vec![z, -o, o, z];
        assert!(matches!(dominant_eigenvalue_dense(&m, 2, 1e-12), Err(Error::GapFailure { .. })));
    }

    #[test]
    fn iid_fprime_variance_is_four() {
        let theta = th(0.0, 1.0, 0.0);
        let xi = AdditiveFunctional::Fprime.evaluator(&theta).unwrap();
        let grid = GridSpec::default_for(&theta).unwrap();
        let rep = spectral_report_auto(&theta, xi, &grid).unwrap();
        assert!((rep.lambda0 - 1.0).norm() < 1e-8);
        assert!(rep.lambda_prime0.norm() <= 1e-4);
        assert!((rep.sigma_sq - 4.0).abs() < 0.4, "{rep:?}");
        assert!(rep.converged);

        let neg = move |x: f64, y: f64| -xi(x, y);
        let rep_neg = spectral_report(&theta, neg, &grid, rep.t_step).unwrap();
        assert!((rep_neg.sigma_sq - rep.sigma_sq).abs() < 1e-6 * rep.sigma_sq);
    }

    #[test]
    fn conjugate_symmetry() {
        let theta = th(0.3, 1.0, 0.1);
        let xi = AdditiveFunctional::Fprime.evaluator(&theta).unwrap();
        let grid = GridSpec::default_for(&theta).unwrap();
        for t in [0.01, 0.02] {
            let p = dominant_eigenvalue(&build_operator(&theta, xi, t, &grid).unwrap(), DEFAULT_EIG_TOL).unwrap();
            let m = dominant_eigenvalue(&build_operator(&theta, xi, -t, &grid).unwrap(), DEFAULT_EIG_TOL).unwrap();
            assert!((p - m.conj()).norm() < 1e-10);
        }
    }

    #[test]
    fn dump_layout() {
        let theta = th(0.0, 1.0, 0.0);
        let grid = GridSpec::new(3.0, 5).unwrap();
        let op = build_operator(&theta, |_, _| 1.0, 0.5, &grid).unwrap();
        let mut buf = Vec::new();
        op.write_dump(&mut buf).unwrap();
        assert_eq!(buf.len(), 16 + 25 * 16);
        assert_eq!(u64::from_le_bytes(buf[0..8].try_into().unwrap()), 5);
        assert_eq!(f64::from_le_bytes(buf[8..16].try_into().unwrap()), 0.5);
        let re = f64::from_le_bytes(buf[16..24].try_into().unwrap());
        assert_eq!(re, op.matrix[0].re);
    }
}
