//! Berry-Esseen measurements for M-estimators on an AR(1)-ARCH(1) Markov chain:
//! simulation, drift checks, closed-form constants, spectral variance, Monte
//! Carlo Kolmogorov distances and a config-driven command line.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bemetrics;
pub mod chain;
pub mod cli;
pub mod error;
pub mod functional;
pub mod mest;
pub mod numeric;
pub mod rng;
pub mod spectral;
pub mod theory;

pub use error::{Error, Result};
