//! Geodesic slice sampling on the unit sphere.
//!
//! * [`sphere`]: unit vectors, geodesics, uniform sampling and the planar
//!   rotation `R_a`.
//! * [`sampler`]: the constant-target transition (a geodesic random walk),
//!   ideal geodesic slice sampling for arbitrary densities, and a seeded
//!   chain runner.
//! * [`contraction`]: the Wasserstein contraction rate bound, the rotation
//!   coupling estimator and empirical Wasserstein decay.
//! * [`diagnostics`]: autocorrelation and integrated autocorrelation time.

pub mod assignment;
pub mod contraction;
pub mod diagnostics;
mod error;
pub mod format;
pub mod rng;
pub mod sampler;
pub mod sphere;
pub mod stats;

pub use error::{Error, Result};
pub use sampler::{run_chain, ChainTrace, Kernel, TargetDensity};
pub use sphere::{Geodesic, UnitVector};
