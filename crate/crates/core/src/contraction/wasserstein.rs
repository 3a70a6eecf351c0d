use std::cmp::Ordering;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assignment::{solve, CostMatrix};
use crate::contraction::rate_bound;
use crate::format::g17;
use crate::rng::{self, derive_seed, StreamRng};
use crate::sampler::gsss_step_constant;
use crate::sphere::{chord_distance, sample_uniform_sphere, UnitVector};
use crate::stats::{mean_std, pairwise_sum};
use crate::{Error, Result};

/// Largest cloud accepted by [`empirical_wasserstein1`].
pub const MAX_CLOUD: usize = 2048;
/// Independent uniform-vs-uniform pairs averaged for the finite-sample floor.
pub const FLOOR_REPS: usize = 8;

const TAG_CHAINS: u64 = 1;
const TAG_REFERENCE: u64 = 2;
const TAG_FLOOR: u64 = 3;

/// Exact 1-Wasserstein distance between two equally weighted point clouds
/// under the chord metric.
///
/// Solves the `n x n` assignment problem on chord distances. The matched
/// distances are summed in ascending order, which makes the result
/// independent of the argument order whenever the optimal matching is unique.
pub fn empirical_wasserstein1(a: &[UnitVector], b: &[UnitVector]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::SizeMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let n = a.len();
    if n == 0 {
        return Err(Error::InvalidArgument("empty sample set".into()));
    }
    if n > MAX_CLOUD {
        return Err(Error::TooLarge { n, max: MAX_CLOUD });
    }
    let d = a[0].dim();
    if let Some(bad) = a.iter().chain(b).find(|v| v.dim() != d) {
        return Err(Error::DimensionMismatch {
            left: d,
            right: bad.dim(),
        });
    }
    let cost = CostMatrix::from_fn(n, |i, j| chord_distance(&a[i], &b[j]).expect("checked dimensions"))?;
    let assignment = solve(&cost);
    let mut matched: Vec<f64> = assignment
        .col_for_row
        .iter()
        .enumerate()
        .map(|(i, &j)| cost.get(i, j))
        .collect();
    matched.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
    Ok(pairwise_sum(&matched) / n as f64)
}

fn uniform_cloud(d: usize, n: usize, rng: &mut StreamRng) -> Result<Vec<UnitVector>> {
    (0..n).map(|_| sample_uniform_sphere(d, rng)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub step: usize,
    pub w1: f64,
    pub floor: f64,
    /// `w1 - floor`.
    pub excess: f64,
}

/// Empirical `W1(delta_{e_1} P^k, uniform)` for `k = 0..=n_steps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub d: usize,
    pub n_samples: usize,
    pub seed: u64,
    pub rate_bound: f64,
    /// Mean W1 between two independent uniform clouds of size `n_samples`.
    pub floor: f64,
    /// Standard deviation of the individual floor replicates.
    pub floor_sd: f64,
    pub floor_samples: Vec<f64>,
    pub rows: Vec<DecayRow>,
}

impl DecayReport {
    /// `excess[k] / excess[k - 1]` for `k = 1..=n_steps`.
    pub fn excess_ratios(&self) -> Vec<f64> {
        self.rows.windows(2).map(|w| w[1].excess / w[0].excess).collect()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "step,w1,floor,excess")?;
        for r in &self.rows {
            writeln!(out, "{},{},{},{}", r.step, g17(r.w1), g17(r.floor), g17(r.excess))?;
        }
        Ok(())
    }
}

/// Starts `n_samples` independent chains at `e_1`, advances them with the
/// constant kernel and after every step measures the empirical W1 distance
/// to a fresh uniform reference cloud of the same size.
///
/// Chain `i` uses its own stream, as do each step's reference cloud and each
/// floor replicate, so the report is a function of the arguments alone.
pub fn wasserstein_decay_experiment(d: usize, n_samples: usize, n_steps: usize, seed: u64) -> Result<DecayReport> {
    if d < 2 {
        return Err(Error::InvalidDimension { d, min: 2 });
    }
    if n_samples == 0 {
        return Err(Error::InvalidArgument("n_samples must be at least 1".into()));
    }
    if n_samples > MAX_CLOUD {
        return Err(Error::TooLarge {
            n: n_samples,
            max: MAX_CLOUD,
        });
    }
    if n_steps == 0 {
        return Err(Error::InvalidArgument("n_steps must be at least 1".into()));
    }

    let floor_samples: Vec<f64> = (0..FLOOR_REPS)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng::stream(derive_seed(seed, TAG_FLOOR), r as u64);
            let a = uniform_cloud(d, n_samples, &mut rng)?;
            let b = uniform_cloud(d, n_samples, &mut rng)?;
            empirical_wasserstein1(&a, &b)
        })
        .collect::<Result<_>>()?;
    let (floor, floor_sd) = mean_std(&floor_samples);

    let chain_seed = derive_seed(seed, TAG_CHAINS);
    let mut rngs: Vec<StreamRng> = (0..n_samples as u64).map(|i| rng::stream(chain_seed, i)).collect();
    let e1 = UnitVector::basis(d, 0)?;
    let mut cloud = vec![e1; n_samples];

    let mut rows = Vec::with_capacity(n_steps + 1);
    for step in 0..=n_steps {
        if step > 0 {
            cloud = cloud
                .par_iter()
                .zip(rngs.par_iter_mut())
                .map(|(x, rng)| gsss_step_constant(x, rng))
                .collect::<Result<_>>()?;
        }
        let mut ref_rng = rng::stream(derive_seed(seed, TAG_REFERENCE), step as u64);
        let reference = uniform_cloud(d, n_samples, &mut ref_rng)?;
        let w1 = empirical_wasserstein1(&cloud, &reference)?;
        rows.push(DecayRow {
            step,
            w1,
            floor,
            excess: w1 - floor,
        });
    }

    Ok(DecayReport {
        d,
        n_samples,
        seed,
        rate_bound: rate_bound(d)?,
        floor,
        floor_sd,
        floor_samples,
        rows,
    })
}
