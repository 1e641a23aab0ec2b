use rand::Rng;
use rand_distr::{Distribution, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

const TAIL_MASS: f64 = 1e-10;

/// Law of the i.i.d. innovations, always normalized to mean 0 and variance 1.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InnovationLaw {
    #[default]
    StandardGaussian,
    /// Student-t with `df` degrees of freedom rescaled to unit variance.
    ScaledStudent { df: u32 },
}

impl InnovationLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            InnovationLaw::StandardGaussian => Ok(()),
            InnovationLaw::ScaledStudent { df } if df > 12 => Ok(()),
            InnovationLaw::ScaledStudent { df } => Err(Error::ParameterDomain {
                name: "df",
                reason: format!("scaled Student innovations need df > 12, got {df}"),
            }),
        }
    }

    fn student_scale(df: f64) -> f64 {
        ((df - 2.0) / df).sqrt()
    }

    pub fn density(&self, y: f64) -> f64 {
        match *self {
            InnovationLaw::StandardGaussian => {
                (-0.5 * y * y).exp() / (2.0 * std::f64::consts::PI).sqrt()
            }
            InnovationLaw::ScaledStudent { df } => {
                let nu = df as f64;
                let c = Self::student_scale(nu);
                let t = y / c;
                let log_norm = ln_gamma(0.5 * (nu + 1.0))
                    - ln_gamma(0.5 * nu)
                    - 0.5 * (nu * std::f64::consts::PI).ln();
                (log_norm - 0.5 * (nu + 1.0) * (1.0 + t * t / nu).ln()).exp() / c
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            InnovationLaw::StandardGaussian => StandardNormal.sample(rng),
            InnovationLaw::ScaledStudent { df } => {
                let nu = df as f64;
                let t: f64 = StudentT::new(nu).expect("df > 0").sample(rng);
                t * Self::student_scale(nu)
            }
        }
    }

    /// `E[eps^4]`.
    pub fn fourth_moment(&self) -> f64 {
        match *self {
            InnovationLaw::StandardGaussian => 3.0,
            InnovationLaw::ScaledStudent { df } => {
                let nu = df as f64;
                3.0 * (nu - 2.0) / (nu - 4.0)
            }
        }
    }

    pub fn has_moment(&self, order: f64) -> bool {
        match *self {
            InnovationLaw::StandardGaussian => true,
            InnovationLaw::ScaledStudent { df } => (df as f64) > order,
        }
    }

    /// Half-width `T` such that `int_{|y|>T} (1+|y|)^p f(y) dy < 1e-10`.
    pub fn truncation(&self, p: f64) -> Result<f64> {
        if !self.has_moment(p) {
            let df = match *self {
                InnovationLaw::ScaledStudent { df } => df as f64,
                InnovationLaw::StandardGaussian => f64::INFINITY,
            };
            return Err(Error::MomentOrder { order: p, df });
        }
        match *self {
            InnovationLaw::StandardGaussian => {
                // d/dy log((1+y)^p phi(y)) <= p/(1+T) - T on [T, inf)
                let mut t: f64 = 1.0;
                loop {
                    let slope = t - p / (1.0 + t);
                    if slope > 0.0 {
                        let tail = 2.0 * (1.0 + t).powf(p) * self.density(t) / slope;
                        if tail < TAIL_MASS {
                            return Ok(t.max(8.0));
                        }
                    }
                    t += 0.25;
                }
            }
            InnovationLaw::ScaledStudent { df } => {
                // f(y) <= K y^{-(nu+1)}, (1+y)^p <= (2y)^p for y >= 1
                let nu = df as f64;
                let c = Self::student_scale(nu);
                let log_norm = ln_gamma(0.5 * (nu + 1.0))
                    - ln_gamma(0.5 * nu)
                    - 0.5 * (nu * std::f64::consts::PI).ln();
                let log_k = log_norm + 0.5 * (nu + 1.0) * nu.ln() + nu * c.ln();
                let log_tail_coeff =
                    (p + 1.0) * 2f64.ln() + log_k - (nu - p).ln() - TAIL_MASS.ln();
                let t = (log_tail_coeff / (nu - p)).exp();
                Ok(t.max(8.0))
            }
        }
    }
}
