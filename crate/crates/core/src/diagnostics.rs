//! Autocorrelation and integrated autocorrelation time (IAT) of chain output.

use serde::{Deserialize, Serialize};

use crate::sampler::ChainTrace;
use crate::{Error, Result};

/// Lower clamp applied to every IAT estimate.
pub const IAT_FLOOR: f64 = 0.1;

const MIN_AUTOCORR_LEN: usize = 4;
const MIN_IAT_LEN: usize = 8;

/// Centered series together with its lag-0 autocovariance.
struct Centered {
    dev: Vec<f64>,
    c0: f64,
}

impl Centered {
    fn new(series: &[f64], min_len: usize) -> Result<Self> {
        let n = series.len();
        if n < min_len {
            return Err(Error::TooShort { n, min: min_len });
        }
        let mean = series.iter().sum::<f64>() / n as f64;
        let dev: Vec<f64> = series.iter().map(|s| s - mean).collect();
        let c0 = dev.iter().map(|x| x * x).sum::<f64>() / n as f64;
        if !(c0 >= 1e-300) {
            return Err(Error::ConstantSeries);
        }
        Ok(Centered { dev, c0 })
    }

    /// Biased autocovariance (normalized by `n`) at `lag`.
    fn autocov(&self, lag: usize) -> f64 {
        let n = self.dev.len();
        if lag >= n {
            return 0.0;
        }
        let s: f64 = self.dev[..n - lag]
            .iter()
            .zip(&self.dev[lag..])
            .map(|(a, b)| a * b)
            .sum();
        s / n as f64
    }

    fn autocorr(&self, lag: usize) -> f64 {
        if lag == 0 {
            1.0
        } else {
            self.autocov(lag) / self.c0
        }
    }
}

/// Sample autocorrelations `rho(0..=max_lag)` with the biased `1/n`
/// autocovariance estimator.
pub fn autocorrelation(series: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let c = Centered::new(series, MIN_AUTOCORR_LEN)?;
    if max_lag == 0 || max_lag >= series.len() {
        return Err(Error::InvalidArgument(format!(
            "max_lag must lie in 1..{}, got {max_lag}",
            series.len()
        )));
    }
    Ok((0..=max_lag).map(|k| c.autocorr(k)).collect())
}

/// Integrated autocorrelation time `1 + 2 sum_{k=1}^{K} rho(k)` with `K`
/// chosen by Geyer's initial positive sequence rule. Returns `(iat, K)`.
///
/// Pairs `Gamma_m = rho(2m) + rho(2m+1)` are accumulated while positive, so
/// `K = 2M + 1` where `M` is the last index of the positive run. If already
/// `Gamma_0 <= 0` the sum stops at `K = 1`. The estimate is clamped below at
/// [`IAT_FLOOR`].
pub fn iat(series: &[f64]) -> Result<(f64, usize)> {
    let c = Centered::new(series, MIN_IAT_LEN)?;
    let n = series.len();
    let first = c.autocorr(1);
    let mut tail_sum = first;
    let mut truncation = 1;
    if 1.0 + first > 0.0 {
        let mut m = 1;
        while 2 * m + 1 < n {
            let (a, b) = (c.autocorr(2 * m), c.autocorr(2 * m + 1));
            if a + b <= 0.0 {
                break;
            }
            tail_sum += a + b;
            truncation = 2 * m + 1;
            m += 1;
        }
    }
    Ok(((1.0 + 2.0 * tail_sum).max(IAT_FLOOR), truncation))
}

/// Per-coordinate IAT of a chain and their average.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IatReport {
    /// Coordinate indices that entered the average.
    pub coordinates: Vec<usize>,
    pub per_coordinate_iat: Vec<f64>,
    pub truncation_lags: Vec<usize>,
    /// Coordinates whose series was constant and therefore skipped.
    pub excluded: Vec<usize>,
    pub mean_iat: f64,
    pub n_its: usize,
}

/// Mean IAT over the `d` coordinate series `(x_n)_i`.
pub fn mean_iat(trace: &ChainTrace) -> Result<IatReport> {
    mean_iat_of(trace, |x| x)
}

/// Like [`mean_iat`] but on the series `f((x_n)_i)`, e.g. squared coordinates.
pub fn mean_iat_of(trace: &ChainTrace, f: impl Fn(f64) -> f64) -> Result<IatReport> {
    let n_its = trace.n_its();
    if n_its < MIN_IAT_LEN {
        return Err(Error::TooShort {
            n: n_its,
            min: MIN_IAT_LEN,
        });
    }
    let mut report = IatReport {
        coordinates: Vec::new(),
        per_coordinate_iat: Vec::new(),
        truncation_lags: Vec::new(),
        excluded: Vec::new(),
        mean_iat: f64::NAN,
        n_its,
    };
    for j in 0..trace.dim() {
        let series: Vec<f64> = trace.states().map(|s| f(s[j])).collect();
        match iat(&series) {
            Ok((tau, lag)) => {
                report.coordinates.push(j);
                report.per_coordinate_iat.push(tau);
                report.truncation_lags.push(lag);
            }
            Err(Error::ConstantSeries) => report.excluded.push(j),
            Err(e) => return Err(e),
        }
    }
    if report.coordinates.is_empty() {
        return Err(Error::ConstantSeries);
    }
    report.mean_iat =
        report.per_coordinate_iat.iter().sum::<f64>() / report.per_coordinate_iat.len() as f64;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use crate::sampler::{run_chain, Kernel};
    use crate::sphere::{rotate_alpha, sample_uniform_sphere, UnitVector};
    use proptest::prelude::*;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn normals(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = stream(seed, 0);
        (0..n).map(|_| rng.sample(StandardNormal)).collect()
    }

    fn ar1(phi: f64, n: usize, seed: u64) -> Vec<f64> {
        let eps = normals(n, seed);
        let mut out = Vec::with_capacity(n);
        // Stationary start.
        let mut x = eps[0] / (1.0 - phi * phi).sqrt();
        out.push(x);
        for e in &eps[1..] {
            x = phi * x + e;
            out.push(x);
        }
        out
    }

    #[test]
    fn lag_zero_is_one() {
        let r = autocorrelation(&normals(100, 1), 5).unwrap();
        assert_eq!(r[0], 1.0);
        assert_eq!(r.len(), 6);
    }

    #[test]
    fn alternating_series_is_anticorrelated() {
        for n in [10usize, 101, 1000] {
            let s: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
            let r = autocorrelation(&s, 1).unwrap();
            assert!((r[1] + 1.0).abs() <= 2.0 / n as f64, "n={n}: {}", r[1]);
        }
    }

    #[test]
    fn ar1_autocorrelation_matches_closed_form() {
        let phi: f64 = 0.5;
        let r = autocorrelation(&ar1(phi, 1_000_000, 2), 10).unwrap();
        for (k, rk) in r.iter().enumerate() {
            assert!((rk - phi.powi(k as i32)).abs() < 0.01, "lag {k}: {rk}");
        }
    }

    #[test]
    fn autocorrelation_errors() {
        assert!(matches!(autocorrelation(&[1.0; 10], 2), Err(Error::ConstantSeries)));
        assert!(matches!(autocorrelation(&[1.0, 2.0, 3.0], 1), Err(Error::TooShort { .. })));
        assert!(autocorrelation(&[1.0, 2.0, 3.0, 5.0], 4).is_err());
        assert!(autocorrelation(&[1.0, 2.0, 3.0, 5.0], 0).is_err());
        assert!(matches!(iat(&[1.0, 2.0, 3.0, 4.0]), Err(Error::TooShort { .. })));
    }

    #[test]
    fn iid_series_has_unit_iat() {
        let (tau, _) = iat(&normals(100_000, 3)).unwrap();
        assert!((0.8..=1.2).contains(&tau), "{tau}");
    }

    #[test]
    fn ar1_iat_matches_closed_form() {
        let (tau, lag) = iat(&ar1(0.5, 1_000_000, 4)).unwrap();
        assert!((tau - 3.0).abs() < 0.3, "{tau}");
        assert!(lag >= 3);
    }

    #[test]
    fn duplicated_series_has_iat_two() {
        let base = normals(50_000, 5);
        let dup: Vec<f64> = base.iter().flat_map(|&x| [x, x]).collect();
        let (tau, _) = iat(&dup).unwrap();
        assert!((tau - 2.0).abs() < 0.3, "{tau}");
    }

    #[test]
    fn strongly_anticorrelated_series_hits_floor() {
        let s: Vec<f64> = (0..100).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        // Every pair rho(2m) + rho(2m+1) = 1/n is positive, so the whole
        // series is summed and the raw estimate is 0.
        let (tau, lag) = iat(&s).unwrap();
        assert_eq!(tau, IAT_FLOOR);
        assert_eq!(lag, 99);
    }

    proptest! {
        #[test]
        fn iat_symmetries(seed in any::<u64>(), a in 0.1f64..10.0, b in -5.0f64..5.0, neg in any::<bool>()) {
            let s = ar1(0.3, 500, seed);
            let (tau, lag) = iat(&s).unwrap();
            let negated: Vec<f64> = s.iter().map(|x| -x).collect();
            prop_assert_eq!(iat(&negated).unwrap(), (tau, lag));
            let a = if neg { -a } else { a };
            let affine: Vec<f64> = s.iter().map(|x| a * x + b).collect();
            let (tau2, _) = iat(&affine).unwrap();
            prop_assert!((tau2 - tau).abs() < 1e-9);
        }
    }

    #[test]
    fn mean_iat_of_iid_points() {
        let d = 8;
        let mut rng = stream(6, 0);
        let states: Vec<UnitVector> = (0..10_000).map(|_| sample_uniform_sphere(d, &mut rng).unwrap()).collect();
        let trace = ChainTrace::from_states(states, 6, "iid").unwrap();
        let report = mean_iat(&trace).unwrap();
        assert!((0.85..=1.15).contains(&report.mean_iat), "{}", report.mean_iat);
        let avg = report.per_coordinate_iat.iter().sum::<f64>() / d as f64;
        assert!((avg - report.mean_iat).abs() < 1e-12);
        assert!(report.per_coordinate_iat.iter().all(|&t| t >= IAT_FLOOR));
    }

    #[test]
    fn random_walk_on_the_circle_is_iid() {
        let trace = run_chain(&UnitVector::basis(2, 0).unwrap(), 10_000, &Kernel::Constant, 7).unwrap();
        let report = mean_iat(&trace).unwrap();
        assert!((0.85..=1.15).contains(&report.mean_iat), "{}", report.mean_iat);
    }

    #[test]
    fn constant_coordinates_are_excluded() {
        let states: Vec<UnitVector> = (0..20)
            .map(|i| UnitVector::on_first_circle(3, i as f64 * 0.7).unwrap())
            .collect();
        let trace = ChainTrace::from_states(states, 0, "circle").unwrap();
        let report = mean_iat(&trace).unwrap();
        assert_eq!(report.excluded, vec![2]);
        assert_eq!(report.coordinates, vec![0, 1]);
    }

    #[test]
    fn mean_iat_is_rotation_invariant_in_distribution() {
        let d = 6;
        let init = UnitVector::basis(d, 0).unwrap();
        let mut plain = Vec::new();
        let mut rotated = Vec::new();
        for seed in 0..10 {
            let trace = run_chain(&init, 5_000, &Kernel::Constant, 100 + seed).unwrap();
            plain.push(mean_iat(&trace).unwrap().mean_iat);
            let turned = trace.map_states(|s| {
                let v = UnitVector::try_from(s.to_vec()).unwrap();
                rotate_alpha(0.9, &v).into_inner()
            });
            rotated.push(mean_iat(&turned).unwrap().mean_iat);
        }
        let interval = |xs: &[f64]| {
            let (m, se) = crate::stats::mean_se(xs);
            (m - 1.96 * se, m + 1.96 * se)
        };
        let (a, b) = (interval(&plain), interval(&rotated));
        assert!(a.0 <= b.1 && b.0 <= a.1, "{a:?} {b:?}");
    }
}
