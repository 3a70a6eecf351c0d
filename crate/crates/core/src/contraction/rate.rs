use std::f64::consts::{FRAC_2_PI, PI};
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::format::g17;
use crate::stats::pairwise_sum;
use crate::{Error, Result};

/// Minimum number of trapezoid nodes on `[0, 2pi)`.
pub const BASE_NODES: usize = 4096;

/// Target for `N * t`, where `t` is the distance of the integrand's nearest
/// complex singularity from the real axis; the periodic trapezoid error
/// decays like `exp(-N t)`.
const DECAY_EXPONENT: f64 = 38.0;

fn one_minus_m(d: usize) -> f64 {
    1.0 / (d as f64 - 1.0)
}

/// Number of trapezoid nodes used for dimension `d` (a multiple of 4).
///
/// The integrand `sqrt(1 - m sin^2 w)` with `m = (d-2)/(d-1)` is singular
/// at `Im w = acosh(1/sqrt(m))`, which approaches the real axis like
/// `1/sqrt(d)`; large dimensions therefore get proportionally more nodes.
pub fn quadrature_nodes(d: usize) -> usize {
    if d <= 2 {
        return BASE_NODES;
    }
    let m = 1.0 - one_minus_m(d);
    let strip = (1.0 / m.sqrt()).acosh();
    let needed = (DECAY_EXPONENT / strip).ceil() as usize;
    needed.max(BASE_NODES).next_multiple_of(4)
}

/// Contraction rate bound `(1/2pi) int_0^{2pi} sqrt(cos^2 w + sin^2 w / (d-1)) dw`.
///
/// Evaluated with the periodic trapezoid rule. The integrand has period `pi`
/// and is even about `pi/2`, so only the nodes in `[0, pi/2]` are evaluated.
pub fn rate_bound(d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidDimension { d, min: 2 });
    }
    if d == 2 {
        return Ok(1.0);
    }
    let q = one_minus_m(d);
    let f = |w: f64| {
        let (s, c) = w.sin_cos();
        (c * c + s * s * q).sqrt()
    };
    let n = quadrature_nodes(d);
    let quarter = n / 4;
    let h = 2.0 * PI / n as f64;
    let interior: Vec<f64> = (1..quarter).map(|k| f(k as f64 * h)).collect();
    let total = 2.0 * (f(0.0) + q.sqrt()) + 4.0 * pairwise_sum(&interior);
    Ok(total / n as f64)
}

/// The `d -> infinity` limit of [`rate_bound`], `2/pi`.
pub fn rate_bound_asymptote() -> f64 {
    FRAC_2_PI
}

/// Spectral gap lower bound `1 - rho` implied by contraction rate `rho`.
pub fn spectral_gap_lower_bound(rho: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::OutOfRange {
            name: "rho",
            value: rho,
            range: "[0, 1]",
        });
    }
    Ok(1.0 - rho)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub d: usize,
    pub rho: f64,
    pub gap_lower: f64,
    pub asymptote_excess: f64,
}

impl RateRow {
    pub fn new(d: usize) -> Result<Self> {
        let rho = rate_bound(d)?;
        Ok(RateRow {
            d,
            rho,
            gap_lower: spectral_gap_lower_bound(rho)?,
            asymptote_excess: rho - rate_bound_asymptote(),
        })
    }
}

/// Rate bound and derived quantities for a range of dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateTable {
    pub asymptote: f64,
    pub rows: Vec<RateRow>,
}

impl RateTable {
    pub fn new(dims: impl IntoIterator<Item = usize>) -> Result<Self> {
        let rows = dims.into_iter().map(RateRow::new).collect::<Result<_>>()?;
        Ok(RateTable {
            asymptote: rate_bound_asymptote(),
            rows,
        })
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "d,rho,gap_lower,asymptote_excess")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{}",
                r.d,
                g17(r.rho),
                g17(r.gap_lower),
                g17(r.asymptote_excess)
            )?;
        }
        Ok(())
    }
}
