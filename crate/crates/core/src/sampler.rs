//! Geodesic slice sampling transitions and a seeded chain runner.
//!
//! For a constant target the threshold of the slice sampler is irrelevant and
//! one transition reduces to: pick a uniformly random geodesic through the
//! current state, then a uniformly random point on it. The ideal variant for
//! an arbitrary density draws the threshold first and then samples uniformly
//! from the part of the geodesic lying in the slice, here by rejection on the
//! angle.

use std::f64::consts::TAU;
use std::fmt;
use std::io::{self, Write};
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::format::g17;
use crate::rng;
use crate::sphere::{geodesic_point, sample_tangent_uniform, Geodesic, UnitVector};
use crate::{Error, Result};

/// Angle proposals per threshold before giving up.
pub const REJECTION_BUDGET: u64 = 1_000_000;
/// Fresh thresholds tried after the first one exhausts its budget.
pub const THRESHOLD_RETRIES: u32 = 3;

type DensityFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// An unnormalized density on the sphere.
///
/// The sampler assumes the density is lower semi-continuous; this cannot be
/// checked for a black-box function.
#[derive(Clone)]
pub struct TargetDensity {
    eval: Arc<DensityFn>,
    label: String,
}

impl fmt::Debug for TargetDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TargetDensity").field("label", &self.label).finish()
    }
}

impl TargetDensity {
    pub fn new(label: impl Into<String>, eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        TargetDensity {
            eval: Arc::new(eval),
            label: label.into(),
        }
    }

    /// `rho(v) = c`.
    pub fn constant(c: f64) -> Self {
        Self::new(format!("constant({c})"), move |_| c)
    }

    /// Indicator of the open hemisphere `v_1 > 0`.
    pub fn hemisphere() -> Self {
        Self::new("hemisphere", |v| if v[0] > 0.0 { 1.0 } else { 0.0 })
    }

    /// `rho(v) = exp(kappa v_1)`, a von Mises–Fisher shape around `e_1`.
    pub fn exp_linear(kappa: f64) -> Self {
        Self::new(format!("exp-linear({kappa})"), move |v| (kappa * v[0]).exp())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Evaluates the density, rejecting negative or non-finite values.
    pub fn eval(&self, v: &UnitVector) -> Result<f64> {
        let value = (self.eval)(v);
        if !value.is_finite() || value < 0.0 {
            return Err(Error::InvalidDensity { value });
        }
        Ok(value)
    }
}

/// Transition kernel used by [`run_chain`].
#[derive(Debug, Clone)]
pub enum Kernel {
    /// Geodesic random walk: the slice sampler for a constant density.
    Constant,
    /// Ideal geodesic slice sampling for an arbitrary density.
    Ideal(TargetDensity),
}

impl Kernel {
    pub fn label(&self) -> String {
        match self {
            Kernel::Constant => "constant".to_string(),
            Kernel::Ideal(t) => format!("ideal({})", t.label()),
        }
    }

    /// One transition; returns the new state and the number of rejected
    /// angle proposals.
    pub fn step<R: Rng + ?Sized>(&self, x: &UnitVector, rng: &mut R) -> Result<(UnitVector, u64)> {
        match self {
            Kernel::Constant => gsss_step_constant(x, rng).map(|v| (v, 0)),
            Kernel::Ideal(target) => gsss_step_ideal(x, target, rng),
        }
    }
}

fn uniform_angle<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random::<f64>() * TAU
}

/// One step of the geodesic random walk: `z ~ U(S^{d-2}_x)`, `w ~ U[0, 2pi)`,
/// return `cos(w) x + sin(w) z`.
pub fn gsss_step_constant<R: Rng + ?Sized>(x: &UnitVector, rng: &mut R) -> Result<UnitVector> {
    let z = sample_tangent_uniform(x, rng)?;
    let omega = uniform_angle(rng);
    Ok(geodesic_point(&Geodesic::new(x.clone(), z)?, omega))
}

/// One step of ideal geodesic slice sampling.
///
/// Draws a threshold `t ~ U(0, rho(x))` and a uniform geodesic through `x`,
/// then proposes uniform angles until the point lies in the slice
/// `{rho > t}`. Returns the accepted point and the number of rejections.
pub fn gsss_step_ideal<R: Rng + ?Sized>(
    x: &UnitVector,
    target: &TargetDensity,
    rng: &mut R,
) -> Result<(UnitVector, u64)> {
    let level = target.eval(x)?;
    if level == 0.0 {
        return Err(Error::ZeroDensityAtState);
    }
    let mut rejections = 0;
    for _ in 0..=THRESHOLD_RETRIES {
        let threshold = loop {
            let u: f64 = rng.random();
            let t = level * u;
            // Open interval (0, rho(x)); `t < level` keeps x itself in the slice.
            if u > 0.0 && t < level {
                break t;
            }
        };
        let geodesic = Geodesic::new(x.clone(), sample_tangent_uniform(x, rng)?)?;
        for _ in 0..REJECTION_BUDGET {
            let candidate = geodesic_point(&geodesic, uniform_angle(rng));
            if target.eval(&candidate)? > threshold {
                return Ok((candidate, rejections));
            }
            rejections += 1;
        }
    }
    Err(Error::RejectionBudgetExceeded {
        proposals: rejections,
    })
}

/// A finished run of the chain. Row 0 is the initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainTrace {
    states: Vec<f64>,
    d: usize,
    seed: u64,
    kernel_label: String,
    rejection_counts: Vec<u64>,
}

/// JSON sidecar written next to a trace CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceMetadata {
    pub seed: u64,
    pub d: usize,
    pub n_its: usize,
    pub kernel_label: String,
    pub rejection_counts: Vec<u64>,
}

impl ChainTrace {
    /// Builds a trace from externally produced states (for example i.i.d.
    /// draws used as a reference). Every state must share one dimension.
    pub fn from_states(states: Vec<UnitVector>, seed: u64, kernel_label: impl Into<String>) -> Result<Self> {
        let first = states
            .first()
            .ok_or_else(|| Error::InvalidArgument("a trace needs at least one state".into()))?;
        let d = first.dim();
        let n = states.len();
        let mut flat = Vec::with_capacity(n * d);
        for s in &states {
            if s.dim() != d {
                return Err(Error::DimensionMismatch {
                    left: d,
                    right: s.dim(),
                });
            }
            flat.extend_from_slice(s);
        }
        Ok(ChainTrace {
            states: flat,
            d,
            seed,
            kernel_label: kernel_label.into(),
            rejection_counts: vec![0; n],
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn n_its(&self) -> usize {
        self.states.len() / self.d
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn kernel_label(&self) -> &str {
        &self.kernel_label
    }

    /// Rejected proposals per transition; entry 0 (the initial state) is 0.
    pub fn rejection_counts(&self) -> &[u64] {
        &self.rejection_counts
    }

    pub fn state(&self, i: usize) -> &[f64] {
        &self.states[i * self.d..(i + 1) * self.d]
    }

    pub fn states(&self) -> impl Iterator<Item = &[f64]> {
        self.states.chunks_exact(self.d)
    }

    /// The series of coordinate `j` across all states.
    pub fn coordinate(&self, j: usize) -> Vec<f64> {
        self.states().map(|s| s[j]).collect()
    }

    /// Applies `f` to every state, e.g. a fixed rotation.
    pub fn map_states(&self, mut f: impl FnMut(&[f64]) -> Vec<f64>) -> ChainTrace {
        let mut states = Vec::with_capacity(self.states.len());
        for s in self.states() {
            let mapped = f(s);
            assert_eq!(mapped.len(), self.d, "map_states must preserve dimension");
            states.extend(mapped);
        }
        ChainTrace {
            states,
            ..self.clone()
        }
    }

    pub fn metadata(&self) -> TraceMetadata {
        TraceMetadata {
            seed: self.seed,
            d: self.d,
            n_its: self.n_its(),
            kernel_label: self.kernel_label.clone(),
            rejection_counts: self.rejection_counts.clone(),
        }
    }

    /// Writes `iter,c0,...,c{d-1}` followed by one row per state.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let header: Vec<String> = std::iter::once("iter".to_string())
            .chain((0..self.d).map(|j| format!("c{j}")))
            .collect();
        writeln!(out, "{}", header.join(","))?;
        for (i, s) in self.states().enumerate() {
            write!(out, "{i}")?;
            for c in s {
                write!(out, ",{}", g17(*c))?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Runs `n_its - 1` transitions of `kernel` from `init`, drawing randomness
/// from the stream keyed by `seed`. The output is a deterministic function of
/// the arguments.
pub fn run_chain(init: &UnitVector, n_its: usize, kernel: &Kernel, seed: u64) -> Result<ChainTrace> {
    if n_its == 0 {
        return Err(Error::InvalidArgument("n_its must be at least 1".into()));
    }
    let d = init.dim();
    let mut rng = rng::stream(seed, 0);
    let mut states = Vec::with_capacity(n_its * d);
    let mut rejection_counts = Vec::with_capacity(n_its);
    states.extend_from_slice(init);
    rejection_counts.push(0);
    let mut x = init.clone();
    for it in 1..n_its {
        let (next, rejected) = kernel.step(&x, &mut rng).map_err(|e| e.at_iteration(it))?;
        states.extend_from_slice(&next);
        rejection_counts.push(rejected);
        x = next;
    }
    Ok(ChainTrace {
        states,
        d,
        seed,
        kernel_label: kernel.label(),
        rejection_counts,
    })
}
