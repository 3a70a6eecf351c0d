//! End-to-end mixing diagnostics on constant-target chains.

use gsss::diagnostics::{mean_iat, mean_iat_of};
use gsss::rng::{self, derive_seed};
use gsss::sphere::sample_uniform_sphere;
use gsss::stats::mean_std;
use gsss::{run_chain, ChainTrace, Kernel, UnitVector};

const N_ITS: usize = 10_000;

fn chain(d: usize, seed: u64) -> ChainTrace {
    run_chain(&UnitVector::basis(d, 0).unwrap(), N_ITS, &Kernel::Constant, seed).unwrap()
}

fn averaged(d: usize, squared: bool) -> (f64, f64) {
    let values: Vec<f64> = (0..10)
        .map(|s| {
            let trace = chain(d, derive_seed(42, s));
            if squared {
                mean_iat_of(&trace, |x| x * x).unwrap().mean_iat
            } else {
                mean_iat(&trace).unwrap().mean_iat
            }
        })
        .collect();
    mean_std(&values)
}

#[test]
fn iid_points_have_unit_iat() {
    let mut rng = rng::stream(3, 0);
    let states = (0..N_ITS).map(|_| sample_uniform_sphere(8, &mut rng).unwrap()).collect();
    let trace = ChainTrace::from_states(states, 3, "iid").unwrap();
    let m = mean_iat(&trace).unwrap().mean_iat;
    assert!((0.85..=1.15).contains(&m), "mean_iat = {m}");
}

#[test]
fn circle_chain_has_unit_iat() {
    let m = mean_iat(&chain(2, 11)).unwrap().mean_iat;
    assert!((0.85..=1.15).contains(&m), "mean_iat = {m}");
}

#[test]
fn report_mean_is_mean_of_coordinates() {
    let r = mean_iat(&chain(16, 5)).unwrap();
    let direct = r.per_coordinate_iat.iter().sum::<f64>() / r.per_coordinate_iat.len() as f64;
    assert!((r.mean_iat - direct).abs() < 1e-12);
    assert_eq!(r.truncation_lags.len(), 16);
    assert!(r.per_coordinate_iat.iter().all(|&t| t >= 0.1));
}

// Squared coordinates follow E[x'^2 | x] = x^2 (d-2)/(2(d-1)) + c, whose IAT
// is 3 - 4/d.
#[test]
fn squared_coordinate_iat_plateaus_near_three() {
    for d in [4, 1024] {
        let (m, sd) = averaged(d, true);
        let theory = 3.0 - 4.0 / d as f64;
        assert!((m - theory).abs() < 0.15, "d = {d}: {m} +- {sd}, theory {theory}");
    }
}

// High-dimension plateau of the raw-coordinate IAT, averaged over 10 seeds.
// Raw coordinates are uncorrelated across steps, so this measures about 1.
#[test]
fn mean_iat_plateau_at_1024() {
    let (m, sd) = averaged(1024, false);
    assert!((2.5..=3.5).contains(&m), "mean_iat at d = 1024: {m} +- {sd}");
}
