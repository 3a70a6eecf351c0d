use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contraction::rate_bound;
use crate::rng;
use crate::sampler::gsss_step_constant;
use crate::sphere::{chord_distance, rotate_alpha, UnitVector};
use crate::stats::mean_std;
use crate::{Error, Result};

/// Number of independent RNG blocks a Monte Carlo run is split into. Fixed,
/// so results do not depend on the thread count.
pub const MC_BLOCKS: usize = 64;

/// Largest tolerated gap between a coupled ratio and `sqrt(v_1^2 + v_2^2)`.
const COUPLING_TOL: f64 = 1e-10;

/// `||v - R_a v|| = sqrt(2 (1 - cos a) (v_1^2 + v_2^2))`.
///
/// `2 (1 - cos a)` is evaluated as `4 sin^2(a/2)` to avoid cancellation.
pub fn coupled_chord_factor(alpha: f64, v: &UnitVector) -> f64 {
    let half = (alpha / 2.0).sin();
    (4.0 * half * half * (v[0] * v[0] + v[1] * v[1])).sqrt()
}

/// Draws `n` independent transitions `v ~ P(start, .)` of the constant
/// kernel and returns `f(v)` for each, in a fixed order.
///
/// Sample `k` lives in block `k * MC_BLOCKS / n` and uses that block's
/// stream, so the output depends only on `(start, n, seed)`.
pub fn map_transitions<T, F>(start: &UnitVector, n: usize, seed: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&UnitVector) -> T + Sync,
{
    let blocks: Vec<Result<Vec<T>>> = (0..MC_BLOCKS)
        .into_par_iter()
        .map(|b| {
            let lo = b * n / MC_BLOCKS;
            let hi = (b + 1) * n / MC_BLOCKS;
            let mut rng = rng::stream(seed, b as u64);
            (lo..hi)
                .map(|_| gsss_step_constant(start, &mut rng).map(|v| f(&v)))
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(n);
    for block in blocks {
        out.extend(block?);
    }
    Ok(out)
}

fn validate(d: usize, alpha: f64, n_samples: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidDimension { d, min: 2 });
    }
    if !(alpha > 0.0 && alpha < TAU) {
        return Err(Error::InvalidAlpha { alpha });
    }
    if n_samples < 2 {
        return Err(Error::InvalidArgument(format!(
            "n_samples must be at least 2, got {n_samples}"
        )));
    }
    Ok(())
}

/// Per-sample coupled ratios `||v - R_a v|| / ||x - y_a||` for
/// `v ~ P(e_1, .)`, with `x = e_1` and `y_a = R_a e_1`.
///
/// Accuracy degrades like `eps / a` for very small `a`, because the
/// denominator is a short chord.
pub fn coupled_ratios(d: usize, alpha: f64, n_samples: usize, seed: u64) -> Result<Vec<f64>> {
    validate(d, alpha, n_samples)?;
    let x = UnitVector::basis(d, 0)?;
    let y = rotate_alpha(alpha, &x);
    let base = chord_distance(&x, &y)?;
    map_transitions(&x, n_samples, seed, |v| {
        let moved = rotate_alpha(alpha, v);
        chord_distance(v, &moved).expect("same dimension") / base
    })
}

/// Monte Carlo estimate of the rotation-coupling transport cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingReport {
    pub d: usize,
    pub alpha: f64,
    pub n_samples: usize,
    /// Mean of `sqrt(v_1^2 + v_2^2)`, equal to the mean coupled ratio.
    pub estimate: f64,
    pub std_error: f64,
    /// [`rate_bound`] at `d`, for comparison.
    pub rate_bound: f64,
    pub seed: u64,
}

/// Estimates `E sqrt(v_1^2 + v_2^2)` with `v ~ P(e_1, .)`, the cost of the
/// rotation coupling between `P(e_1, .)` and `P(y_a, .)` divided by
/// `||e_1 - y_a||`.
///
/// The estimate does not depend on `alpha`. Every sample is additionally
/// pushed through the explicit coupling `v -> R_a v`, and the run fails with
/// [`Error::CouplingCheckFailed`] if any coupled ratio deviates from the
/// reduced value by more than `1e-10`.
pub fn estimate_dobrushin_coupled(d: usize, alpha: f64, n_samples: usize, seed: u64) -> Result<CouplingReport> {
    validate(d, alpha, n_samples)?;
    let x = UnitVector::basis(d, 0)?;
    let y = rotate_alpha(alpha, &x);
    let base = chord_distance(&x, &y)?;
    let pairs = map_transitions(&x, n_samples, seed, |v| {
        let reduced = (v[0] * v[0] + v[1] * v[1]).sqrt();
        let coupled = chord_distance(v, &rotate_alpha(alpha, v)).expect("same dimension") / base;
        (reduced, coupled)
    })?;
    let deviation = pairs.iter().map(|(r, c)| (r - c).abs()).fold(0.0, f64::max);
    if deviation > COUPLING_TOL {
        return Err(Error::CouplingCheckFailed { deviation });
    }
    let reduced: Vec<f64> = pairs.into_iter().map(|(r, _)| r).collect();
    let (estimate, sd) = mean_std(&reduced);
    Ok(CouplingReport {
        d,
        alpha,
        n_samples,
        estimate,
        std_error: sd / (n_samples as f64).sqrt(),
        rate_bound: rate_bound(d)?,
        seed,
    })
}
