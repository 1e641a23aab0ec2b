//! Additive functionals `S_n = sum xi(X_{k-1}, X_k)` studied in the example.

use serde::{Deserialize, Serialize};

use crate::chain::{ModelParams, Trajectory};
use crate::error::Result;
use crate::numeric::{batch_means_variance, KahanSum};
use crate::theory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdditiveFunctional {
    /// `F'(rho0, x, y) = -2 x (y - rho0 x)`; centered under the stationary law.
    Fprime,
    /// `F''(rho0, x, y) - m(theta) = 2 x^2 - m(theta)`.
    FsecondCentered,
    /// Identically zero.
    Zero,
}

impl AdditiveFunctional {
    pub fn name(&self) -> &'static str {
        match self {
            AdditiveFunctional::Fprime => "fprime",
            AdditiveFunctional::FsecondCentered => "fsecond_centered",
            AdditiveFunctional::Zero => "zero",
        }
    }

    /// Evaluator `(x, y) -> xi(x, y)` for a fixed `theta`.
    pub fn evaluator(&self, theta: &ModelParams) -> Result<impl Fn(f64, f64) -> f64 + Sync + Copy> {
        let kind = *self;
        let rho0 = theta.rho0;
        let m = match kind {
            AdditiveFunctional::FsecondCentered => theory::m_of_theta(theta)?,
            _ => 0.0,
        };
        Ok(move |x: f64, y: f64| match kind {
            AdditiveFunctional::Fprime => -2.0 * x * (y - rho0 * x),
            AdditiveFunctional::FsecondCentered => 2.0 * x * x - m,
            AdditiveFunctional::Zero => 0.0,
        })
    }

    /// `S_n` along a trajectory.
    pub fn sum(&self, traj: &Trajectory) -> Result<f64> {
        let xi = self.evaluator(&traj.theta)?;
        Ok(traj.pairs().map(|(x, y)| xi(x, y)).collect::<KahanSum>().value())
    }

    pub fn values(&self, traj: &Trajectory) -> Result<Vec<f64>> {
        let xi = self.evaluator(&traj.theta)?;
        Ok(traj.pairs().map(|(x, y)| xi(x, y)).collect())
    }

    /// Long-run variance from the closed forms.
    pub fn theory_variance(&self, theta: &ModelParams) -> Result<f64> {
        match self {
            AdditiveFunctional::Fprime => theory::sigma1_sq(theta),
            AdditiveFunctional::FsecondCentered => theory::sigma2_sq(theta),
            AdditiveFunctional::Zero => Ok(0.0),
        }
    }

    /// Batch-means long-run variance along `traj` with `batches` batches.
    pub fn batch_means_variance(&self, traj: &Trajectory, batches: usize) -> Result<f64> {
        batch_means_variance(&self.values(traj)?, batches)
    }
}
