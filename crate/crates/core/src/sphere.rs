//! Points, geodesics and uniform sampling on the unit sphere `S^{d-1}`.

use std::f64::consts::TAU;
use std::ops::Deref;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Norms below this are treated as zero by [`normalize`].
pub const ZERO_NORM: f64 = 1e-300;
/// Tolerance for the unit-norm invariant.
pub const NORM_TOL: f64 = 1e-12;
/// Tolerance for `base . tangent = 0` on a [`Geodesic`].
pub const ORTHO_TOL: f64 = 1e-10;

/// Projected Gaussian vectors shorter than this are redrawn.
const PROJECTION_FLOOR: f64 = 1e-12;

/// A point on `S^{d-1}` with `d >= 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct UnitVector(Vec<f64>);

impl UnitVector {
    /// The standard basis vector `e_{axis}` in dimension `d`.
    pub fn basis(d: usize, axis: usize) -> Result<Self> {
        check_dim(d)?;
        if axis >= d {
            return Err(Error::InvalidArgument(format!(
                "axis {axis} out of range for dimension {d}"
            )));
        }
        let mut coords = vec![0.0; d];
        coords[axis] = 1.0;
        Ok(UnitVector(coords))
    }

    /// The point `(cos a, sin a, 0, ..., 0)`.
    pub fn on_first_circle(d: usize, alpha: f64) -> Result<Self> {
        check_dim(d)?;
        let mut coords = vec![0.0; d];
        coords[0] = alpha.cos();
        coords[1] = alpha.sin();
        Ok(UnitVector(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &UnitVector) -> Result<f64> {
        same_dim(self, other)?;
        Ok(dot(&self.0, &other.0))
    }

    /// The antipodal point `-v`.
    pub fn antipode(&self) -> UnitVector {
        UnitVector(self.0.iter().map(|c| -c).collect())
    }
}

impl Deref for UnitVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for UnitVector {
    type Error = Error;

    /// Accepts `v` only if it already has unit norm (within [`NORM_TOL`]);
    /// use [`normalize`] to rescale arbitrary vectors.
    fn try_from(v: Vec<f64>) -> Result<Self> {
        check_dim(v.len())?;
        let norm = norm(&v);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::OutOfRange {
                name: "norm",
                value: norm,
                range: "1 +- 1e-12",
            });
        }
        Ok(UnitVector(v))
    }
}

impl From<UnitVector> for Vec<f64> {
    fn from(v: UnitVector) -> Vec<f64> {
        v.0
    }
}

/// A great circle `w -> cos(w) base + sin(w) tangent` with `base ⊥ tangent`.
#[derive(Debug, Clone, PartialEq)]
pub struct Geodesic {
    base: UnitVector,
    tangent: UnitVector,
}

impl Geodesic {
    pub fn new(base: UnitVector, tangent: UnitVector) -> Result<Self> {
        let dot = base.dot(&tangent)?;
        if dot.abs() > ORTHO_TOL {
            return Err(Error::NotOrthogonal { dot });
        }
        Ok(Geodesic { base, tangent })
    }

    pub fn base(&self) -> &UnitVector {
        &self.base
    }

    pub fn tangent(&self) -> &UnitVector {
        &self.tangent
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    /// Point at angle `omega` (radians) along the geodesic.
    pub fn point(&self, omega: f64) -> UnitVector {
        geodesic_point(self, omega)
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidDimension { d, min: 2 });
    }
    Ok(())
}

fn same_dim(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// Rescales `v` to unit length.
pub fn normalize(mut v: Vec<f64>) -> Result<UnitVector> {
    check_dim(v.len())?;
    let n = norm(&v);
    if !(n > ZERO_NORM) || !n.is_finite() {
        return Err(Error::ZeroVector);
    }
    v.iter_mut().for_each(|c| *c /= n);
    Ok(UnitVector(v))
}

fn gaussian_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    (0..d).map(|_| rng.sample(StandardNormal)).collect()
}

/// Draws from the uniform distribution on `S^{d-1}` by normalizing a standard
/// Gaussian vector.
pub fn sample_uniform_sphere<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<UnitVector> {
    check_dim(d)?;
    loop {
        let w = gaussian_vector(d, rng);
        if norm(&w) > PROJECTION_FLOOR {
            return normalize(w);
        }
    }
}

/// Draws `z` uniformly from the great subsphere `{z ∈ S^{d-1} : x . z = 0}`.
///
/// A Gaussian vector is projected onto the orthogonal complement of `x` and
/// normalized; rotational invariance of the Gaussian makes the result exactly
/// uniform. For `d = 2` this returns one of the two unit vectors orthogonal
/// to `x`, each with probability 1/2.
pub fn sample_tangent_uniform<R: Rng + ?Sized>(x: &UnitVector, rng: &mut R) -> Result<UnitVector> {
    let d = x.dim();
    check_dim(d)?;
    loop {
        let mut w = gaussian_vector(d, rng);
        let along = dot(&w, x);
        w.iter_mut().zip(x.iter()).for_each(|(wi, xi)| *wi -= along * xi);
        if norm(&w) < PROJECTION_FLOOR {
            continue;
        }
        let mut z = normalize(w)?;
        // A second projection pass removes the rounding left by the first.
        let residual = dot(&z, x);
        if residual != 0.0 {
            let w: Vec<f64> = z.iter().zip(x.iter()).map(|(zi, xi)| zi - residual * xi).collect();
            z = normalize(w)?;
        }
        return Ok(z);
    }
}

/// `cos(omega) base + sin(omega) tangent`, renormalized.
pub fn geodesic_point(g: &Geodesic, omega: f64) -> UnitVector {
    let omega = omega.rem_euclid(TAU);
    let (s, c) = omega.sin_cos();
    let v: Vec<f64> = g
        .base
        .iter()
        .zip(g.tangent.iter())
        .map(|(b, t)| c * b + s * t)
        .collect();
    normalize(v).expect("a point on a great circle has unit norm")
}

/// Applies the rotation by `alpha` in the plane of the first two coordinates.
pub fn rotate_alpha(alpha: f64, v: &UnitVector) -> UnitVector {
    let (s, c) = alpha.sin_cos();
    let mut out = v.0.clone();
    out[0] = c * v[0] - s * v[1];
    out[1] = s * v[0] + c * v[1];
    UnitVector(out)
}

/// Euclidean (chord) distance `||u - v||`.
pub fn chord_distance(u: &UnitVector, v: &UnitVector) -> Result<f64> {
    same_dim(u, v)?;
    Ok(u
        .iter()
        .zip(v.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    /// Sample mean and standard error of the mean.
    fn mean_se(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
        (m, (var / n).sqrt())
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize(vec![2.0, 0.0, 0.0]).unwrap().coords(), &[1.0, 0.0, 0.0]);
        let v = normalize(vec![1.0, 1.0, 0.0, 0.0]).unwrap();
        assert_close(&v, &[FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0, 0.0], 1e-15);
        assert!(matches!(normalize(vec![0.0, 0.0, 0.0]), Err(Error::ZeroVector)));
        assert!(matches!(normalize(vec![1e-301, 0.0]), Err(Error::ZeroVector)));
        assert!(matches!(normalize(vec![1.0]), Err(Error::InvalidDimension { .. })));
    }

    #[test]
    fn try_from_rejects_non_unit() {
        assert!(UnitVector::try_from(vec![1.0, 1.0]).is_err());
        assert!(UnitVector::try_from(vec![0.6, 0.8]).is_ok());
    }

    #[test]
    fn uniform_sphere_moments() {
        let d = 5;
        let n = 1_000_000;
        let mut rng = stream(11, 0);
        let mut cols = vec![Vec::with_capacity(n); d];
        for _ in 0..n {
            let v = sample_uniform_sphere(d, &mut rng).unwrap();
            assert!((norm(&v) - 1.0).abs() < NORM_TOL);
            for (c, x) in cols.iter_mut().zip(v.iter()) {
                c.push(*x);
            }
        }
        for col in &cols {
            let (m, se) = mean_se(col);
            assert!(m.abs() < 4.0 * se, "mean {m} se {se}");
            let sq: Vec<f64> = col.iter().map(|x| x * x).collect();
            let (m2, se2) = mean_se(&sq);
            assert!((m2 - 0.2).abs() < 4.0 * se2, "E[v^2] {m2} se {se2}");
        }
    }

    #[test]
    fn uniform_sphere_is_seeded() {
        let a = sample_uniform_sphere(7, &mut stream(3, 9)).unwrap();
        let b = sample_uniform_sphere(7, &mut stream(3, 9)).unwrap();
        assert_eq!(a, b);
        assert!(sample_uniform_sphere(1, &mut stream(3, 9)).is_err());
    }

    #[test]
    fn tangent_is_orthogonal_and_unit() {
        let mut rng = stream(5, 0);
        for d in [2, 3, 17, 256] {
            for _ in 0..200 {
                let x = sample_uniform_sphere(d, &mut rng).unwrap();
                let z = sample_tangent_uniform(&x, &mut rng).unwrap();
                assert!(x.dot(&z).unwrap().abs() < ORTHO_TOL);
                assert!((norm(&z) - 1.0).abs() < NORM_TOL);
            }
        }
    }

    #[test]
    fn tangent_in_two_dimensions_is_a_fair_sign() {
        let x = UnitVector::basis(2, 0).unwrap();
        let mut rng = stream(8, 0);
        let n = 100_000;
        let plus = (0..n)
            .filter(|_| sample_tangent_uniform(&x, &mut rng).unwrap()[1] > 0.0)
            .count() as f64;
        // Binomial(n, 1/2): 4 standard deviations.
        assert!((plus - n as f64 / 2.0).abs() < 4.0 * (n as f64 / 4.0).sqrt());
    }

    fn tangent_second_moments(d: usize, n: usize, seed: u64) -> Vec<(f64, f64)> {
        let x = UnitVector::basis(d, 0).unwrap();
        let mut rng = stream(seed, 0);
        let mut cols = vec![Vec::with_capacity(n); d];
        for _ in 0..n {
            let z = sample_tangent_uniform(&x, &mut rng).unwrap();
            for (c, v) in cols.iter_mut().zip(z.iter()) {
                c.push(v * v);
            }
        }
        cols.iter().map(|c| mean_se(c)).collect()
    }

    #[test]
    fn tangent_second_moment_is_one_over_d_minus_one() {
        for d in [3, 10] {
            let moments = tangent_second_moments(d, 1_000_000, 21);
            assert!(moments[0].0 < 1e-20);
            // Exchangeability of coordinates 2..d: every marginal moment agrees.
            for &(m, se) in &moments[1..] {
                let target = 1.0 / (d as f64 - 1.0);
                assert!((m - target).abs() < 4.0 * se, "d={d}: {m} vs {target}");
            }
        }
    }

    #[test]
    fn geodesic_examples() {
        let x = UnitVector::basis(3, 0).unwrap();
        let z = UnitVector::basis(3, 1).unwrap();
        let g = Geodesic::new(x.clone(), z.clone()).unwrap();
        assert_close(&geodesic_point(&g, 0.0), &x, 1e-12);
        assert_close(&geodesic_point(&g, PI / 2.0), &z, 1e-12);
        assert_close(&geodesic_point(&g, PI), &x.antipode(), 1e-12);
        assert!(matches!(
            Geodesic::new(x.clone(), x.clone()),
            Err(Error::NotOrthogonal { .. })
        ));
    }

    #[test]
    fn rotation_examples() {
        let x = UnitVector::basis(4, 0).unwrap();
        let y = UnitVector::on_first_circle(4, 0.3).unwrap();
        assert_close(&rotate_alpha(0.3, &x), &y, 1e-15);
        let v = normalize(vec![0.3, -0.2, 0.9]).unwrap();
        assert_eq!(rotate_alpha(0.0, &v), v);
        let e2 = UnitVector::basis(3, 1).unwrap();
        assert_close(&rotate_alpha(PI, &e2), &[0.0, -1.0, 0.0], 1e-15);
    }

    #[test]
    fn chord_examples() {
        let v = normalize(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(chord_distance(&v, &v).unwrap(), 0.0);
        assert!((chord_distance(&v, &v.antipode()).unwrap() - 2.0).abs() < 1e-15);
        let x = UnitVector::basis(5, 0).unwrap();
        for alpha in [0.1, 1.0, 2.5, 4.0, 6.0] {
            let y = UnitVector::on_first_circle(5, alpha).unwrap();
            let c = chord_distance(&x, &y).unwrap();
            assert!((c * c - 2.0 * (1.0 - alpha.cos())).abs() < 1e-12);
        }
        let w = UnitVector::basis(2, 0).unwrap();
        assert!(matches!(
            chord_distance(&x, &w),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    fn unit_vector(d: std::ops::Range<usize>) -> impl Strategy<Value = UnitVector> {
        d.prop_flat_map(|d| proptest::collection::vec(-1.0f64..1.0, d))
            .prop_filter_map("nonzero", |v| normalize(v).ok())
    }

    proptest! {
        #[test]
        fn geodesic_points_are_unit_and_periodic(seed in any::<u64>(), d in 2usize..40, omega in -2.0 * TAU..2.0 * TAU) {
            let mut rng = stream(seed, 0);
            let x = sample_uniform_sphere(d, &mut rng).unwrap();
            let z = sample_tangent_uniform(&x, &mut rng).unwrap();
            let g = Geodesic::new(x, z).unwrap();
            let p = geodesic_point(&g, omega);
            prop_assert!((norm(&p) - 1.0).abs() < NORM_TOL);
            let q = geodesic_point(&g, omega + TAU);
            for (a, b) in p.iter().zip(q.iter()) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }

        #[test]
        fn rotations_compose_and_invert(v in unit_vector(2..30), a in -PI..PI, b in -PI..PI) {
            let r = rotate_alpha(a, &v);
            prop_assert!((norm(&r) - 1.0).abs() < 1e-14);
            let ab = rotate_alpha(a, &rotate_alpha(b, &v));
            let direct = rotate_alpha(a + b, &v);
            for (x, y) in ab.iter().zip(direct.iter()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
            let back = rotate_alpha(-a, &r);
            for (x, y) in back.iter().zip(v.iter()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }
}
