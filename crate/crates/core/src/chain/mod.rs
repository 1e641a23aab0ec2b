//! The AR(1)-ARCH(1) chain `X_k = rho0 X_{k-1} + sqrt(a0 + b0 X_{k-1}^2) eps_k`
//! started at `X_0 = 0`, its simulation, and the drift/minorization audit.

mod drift;
mod innovation;

use std::io::Write;

use serde::{Deserialize, Serialize};

pub use drift::{
    check_drift, check_iota, lyapunov_image, lyapunov_ratio, lyapunov_ratio_bound, minorization_mass, DriftReport, DriftVerdict,
    DEFAULT_S_LADDER,
};
pub use innovation::InnovationLaw;

use crate::error::{Error, Result};
use crate::rng;

/// One parameter point `theta = (rho0, a0, b0)` with its innovation law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub rho0: f64,
    pub a0: f64,
    pub b0: f64,
    #[serde(default)]
    pub innovation: InnovationLaw,
}

impl ModelParams {
    pub fn new(rho0: f64, a0: f64, b0: f64) -> Result<Self> {
        Self::with_innovation(rho0, a0, b0, InnovationLaw::StandardGaussian)
    }

    pub fn with_innovation(rho0: f64, a0: f64, b0: f64, innovation: InnovationLaw) -> Result<Self> {
        let theta = ModelParams { rho0, a0, b0, innovation };
        theta.validate()?;
        Ok(theta)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason: String| Err(Error::ParameterDomain { name, reason });
        if !self.rho0.is_finite() || self.rho0.abs() >= 1.0 {
            return bad("rho0", format!("need |rho0| < 1, got {}", self.rho0));
        }
        if !self.a0.is_finite() || self.a0 <= 0.0 {
            return bad("a0", format!("need a0 > 0, got {}", self.a0));
        }
        // b0 = 0 is allowed so the plain AR(1) chain stays reachable.
        if !self.b0.is_finite() || !(0.0..1.0).contains(&self.b0) {
            return bad("b0", format!("need 0 <= b0 < 1, got {}", self.b0));
        }
        if self.rho0 * self.rho0 + self.b0 >= 1.0 {
            return bad(
                "b0",
                format!("need rho0^2 + b0 < 1, got {}", self.rho0 * self.rho0 + self.b0),
            );
        }
        self.innovation.validate()
    }

    /// Conditional standard deviation `sigma(x; a0, b0)`.
    #[inline]
    pub fn sigma(&self, x: f64) -> f64 {
        (self.a0 + self.b0 * x * x).sqrt()
    }

    #[inline]
    pub fn step(&self, x: f64, eps: f64) -> f64 {
        self.rho0 * x + self.sigma(x) * eps
    }

    /// Transition density `q(x, u) = f((u - rho0 x)/sigma(x)) / sigma(x)`.
    pub fn transition_density(&self, x: f64, u: f64) -> f64 {
        let s = self.sigma(x);
        self.innovation.density((u - self.rho0 * x) / s) / s
    }

    /// Stable identifier used in exports and seed derivation.
    pub fn id(&self) -> String {
        format!("rho{}_a{}_b{}", self.rho0, self.a0, self.b0)
    }

    pub(crate) fn key(&self) -> u64 {
        let law = match self.innovation {
            InnovationLaw::StandardGaussian => 0,
            InnovationLaw::ScaledStudent { df } => 1 + df as u64,
        };
        rng::fold_key(&[self.rho0.to_bits(), self.a0.to_bits(), self.b0.to_bits(), law])
    }
}

/// A simulated path `X_0, ..., X_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub x: Vec<f64>,
    /// `None` when the innovations were injected directly.
    pub seed: Option<u64>,
    pub theta: ModelParams,
}

impl Trajectory {
    /// Number of transitions `n`.
    pub fn len(&self) -> usize {
        self.x.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.x.len() <= 1
    }

    /// Consecutive pairs `(X_{k-1}, X_k)`, `k = 1..n`.
    pub fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.x.windows(2).map(|w| (w[0], w[1]))
    }

    /// Recover `eps_k = (X_k - rho0 X_{k-1}) / sigma(X_{k-1})`.
    pub fn innovations(&self) -> Vec<f64> {
        self.pairs()
            .map(|(x, y)| (y - self.theta.rho0 * x) / self.theta.sigma(x))
            .collect()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "k,x")?;
        for (k, x) in self.x.iter().enumerate() {
            writeln!(w, "{k},{x}")?;
        }
        Ok(())
    }
}

/// Innovation stream of a seeded simulation.
pub fn innovation_stream(law: InnovationLaw, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng::stream(seed);
    (0..n).map(|_| law.sample(&mut rng)).collect()
}

pub fn simulate(theta: &ModelParams, n: usize, seed: u64) -> Result<Trajectory> {
    theta.validate()?;
    if n == 0 {
        return Err(Error::ParameterDomain { name: "n", reason: "need n >= 1".into() });
    }
    let mut rng = rng::stream(seed);
    let mut x = Vec::with_capacity(n + 1);
    let mut prev = 0.0;
    x.push(prev);
    for _ in 0..n {
        prev = theta.step(prev, theta.innovation.sample(&mut rng));
        x.push(prev);
    }
    Ok(Trajectory { x, seed: Some(seed), theta: *theta })
}

pub fn simulate_with_innovations(theta: &ModelParams, eps: &[f64]) -> Result<Trajectory> {
    simulate_from(theta, 0.0, eps)
}

/// Like [`simulate_with_innovations`] but from an arbitrary `X_0`; used by
/// tests that need a non-degenerate start.
pub fn simulate_from(theta: &ModelParams, x0: f64, eps: &[f64]) -> Result<Trajectory> {
    theta.validate()?;
    if let Some(k) = eps.iter().position(|e| !e.is_finite()) {
        return Err(Error::ParameterDomain {
            name: "eps",
            reason: format!("innovation {k} is not finite"),
        });
    }
    let mut x = Vec::with_capacity(eps.len() + 1);
    x.push(x0);
    for &e in eps {
        let next = theta.step(*x.last().unwrap(), e);
        x.push(next);
    }
    Ok(Trajectory { x, seed: None, theta: *theta })
}

/// The compact parameter box with its finite evaluation grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamBox {
    pub rho_bar: f64,
    pub a_min: f64,
    pub a_max: f64,
    pub b_min: f64,
    pub b_max: f64,
    /// Order of the Lyapunov function `V(x) = (1 + |x|)^p`.
    pub p: f64,
    pub innovation: InnovationLaw,
    pub grid: Vec<ModelParams>,
}

/// Default lattice resolution `(rho, a, b)`.
pub const DEFAULT_GRID: [usize; 3] = [5, 3, 3];

fn ladder(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![0.5 * (lo + hi)],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

impl ParamBox {
    /// Box with a regular `dims[0] x dims[1] x dims[2]` lattice over
    /// `[-rho_bar, rho_bar] x [a_min, a_max] x [b_min, b_max]`, keeping only
    /// lattice points with `rho^2 + b < 1`.
    pub fn lattice(
        rho_bar: f64,
        (a_min, a_max): (f64, f64),
        (b_min, b_max): (f64, f64),
        p: f64,
        innovation: InnovationLaw,
        dims: [usize; 3],
    ) -> Result<Self> {
        let mut bx = ParamBox { rho_bar, a_min, a_max, b_min, b_max, p, innovation, grid: vec![] };
        bx.validate_bounds()?;
        let mut grid = Vec::new();
        for &r in &ladder(-rho_bar, rho_bar, dims[0]) {
            for &a in &ladder(a_min, a_max, dims[1]) {
                for &b in &ladder(b_min, b_max, dims[2]) {
                    // points with rho^2 + b >= 1 are outside the stationary region
                    if let Ok(t) = ModelParams::with_innovation(r, a, b, innovation) {
                        grid.push(t);
                    }
                }
            }
        }
        if grid.is_empty() {
            return Err(Error::ParameterDomain { name: "grid", reason: "no feasible lattice point".into() });
        }
        bx.grid = grid;
        Ok(bx)
    }

    /// Replace the grid with explicit points, each of which must lie in the box.
    pub fn with_grid(mut self, grid: Vec<ModelParams>) -> Result<Self> {
        for t in &grid {
            t.validate()?;
            if !self.contains(t) {
                return Err(Error::ParameterDomain {
                    name: "grid",
                    reason: format!("{} lies outside the box", t.id()),
                });
            }
        }
        self.grid = grid;
        Ok(self)
    }

    pub fn contains(&self, t: &ModelParams) -> bool {
        let eps = 1e-12;
        t.rho0.abs() <= self.rho_bar + eps
            && t.a0 >= self.a_min - eps
            && t.a0 <= self.a_max + eps
            && t.b0 >= self.b_min - eps
            && t.b0 <= self.b_max + eps
    }

    fn validate_bounds(&self) -> Result<()> {
        let bad = |name, reason: String| Err(Error::ParameterDomain { name, reason });
        if !(self.rho_bar > 0.0 && self.rho_bar < 1.0) {
            return bad("rho_bar", format!("need 0 < rho_bar < 1, got {}", self.rho_bar));
        }
        if !(self.a_min > 0.0 && self.a_min < self.a_max && self.a_max.is_finite()) {
            return bad("a_min", format!("need 0 < a_min < a_max, got [{}, {}]", self.a_min, self.a_max));
        }
        if !(self.b_min > 0.0 && self.b_min < self.b_max && self.b_max < 1.0) {
            return bad("b_min", format!("need 0 < b_min < b_max < 1, got [{}, {}]", self.b_min, self.b_max));
        }
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return bad("p", format!("need p >= 1, got {}", self.p));
        }
        self.innovation.validate()
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_bounds()?;
        if self.grid.is_empty() {
            return Err(Error::ParameterDomain { name: "grid", reason: "grid is empty".into() });
        }
        for t in &self.grid {
            t.validate()?;
        }
        Ok(())
    }
}
