//! Summary statistics and Kolmogorov–Smirnov tests used to check samplers.

use std::cmp::Ordering;

/// Sum by recursive halving. The result depends only on the order of `xs`.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 64;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let (l, r) = xs.split_at(xs.len() / 2);
    pairwise_sum(l) + pairwise_sum(r)
}

/// Sample mean and unbiased sample standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = pairwise_sum(xs) / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    (mean, (pairwise_sum(&dev) / (n - 1.0)).sqrt())
}

/// Sample mean and standard error of the mean.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let (m, s) = mean_std(xs);
    (m, s / (xs.len() as f64).sqrt())
}

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    v
}

/// Asymptotic critical value `c(level)` of the Kolmogorov distribution.
pub fn ks_critical(level: f64) -> f64 {
    (-(level / 2.0).ln() / 2.0).sqrt()
}

/// Outcome of a Kolmogorov–Smirnov test.
#[derive(Debug, Clone, Copy)]
pub struct KsTest {
    pub statistic: f64,
    pub critical: f64,
}

impl KsTest {
    pub fn rejects(&self) -> bool {
        self.statistic > self.critical
    }
}

/// One-sample KS test of `xs` against the continuous CDF `cdf`.
pub fn ks_one_sample(xs: &[f64], cdf: impl Fn(f64) -> f64, level: f64) -> KsTest {
    let s = sorted(xs);
    let n = s.len() as f64;
    let statistic = s
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max);
    KsTest {
        statistic,
        critical: ks_critical(level) / n.sqrt(),
    }
}

/// Two-sample KS test.
pub fn ks_two_sample(a: &[f64], b: &[f64], level: f64) -> KsTest {
    let (a, b) = (sorted(a), sorted(b));
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut statistic: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        statistic = statistic.max((i as f64 / n - j as f64 / m).abs());
    }
    KsTest {
        statistic,
        critical: ks_critical(level) * ((n + m) / (n * m)).sqrt(),
    }
}
