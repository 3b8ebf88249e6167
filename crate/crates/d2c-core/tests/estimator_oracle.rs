//! Statistical oracles for the MI estimators: closed-form convergence,
//! data-processing sanity on a known chain, and algebraic invariants.

use d2c_core::estimator::{cond_mi, gaussian_mi, EstimatorConfig};
use d2c_core::rng;
use proptest::prelude::*;
use rand::Rng;

fn bivariate(n: usize, rho: f64, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut r = rng::stream(seed, &[0xaa]);
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let z1 = rng::standard_normal(&mut r);
        let z2 = rng::standard_normal(&mut r);
        x.push(z1);
        y.push(rho * z1 + (1.0 - rho * rho).sqrt() * z2);
    }
    (x, y)
}

#[test]
fn gaussian_mi_converges_to_closed_form() {
    // At rho = 0.2 a single N = 10000 sample carries ~10% relative noise
    // in the MI estimate, so the closed-form comparison averages the
    // estimator over 50 fixed seeds (each with N = 10000).
    for (k, rho) in [0.2, 0.5, 0.8].into_iter().enumerate() {
        let mut acc = 0.0;
        let reps = 50;
        for rep in 0..reps {
            let (x, y) = bivariate(10_000, rho, 40 + (k * reps + rep) as u64);
            acc += gaussian_mi(&x, &y).unwrap();
        }
        let got = acc / reps as f64;
        let truth = -0.5 * (1.0 - rho * rho).ln();
        let rel = (got - truth).abs() / truth;
        assert!(rel < 0.05, "rho {rho}: estimated {got}, true {truth}, rel err {rel}");
    }
}

#[test]
fn data_processing_inequality_on_chain() {
    // z1 -> z2 -> z3: I(z1; z3) should not exceed I(z1; z2) by more than
    // estimation slack, in at least 90 of 100 seeds.
    let mut ok = 0;
    for seed in 0..100u64 {
        let mut r = rng::stream(seed, &[0xd1]);
        let n = 2000;
        let z1: Vec<f64> = (0..n).map(|_| rng::standard_normal(&mut r)).collect();
        let z2: Vec<f64> =
            z1.iter().map(|&v| 0.8 * v + 0.6 * rng::standard_normal(&mut r)).collect();
        let z3: Vec<f64> =
            z2.iter().map(|&v| 0.8 * v + 0.6 * rng::standard_normal(&mut r)).collect();
        let i12 = gaussian_mi(&z1, &z2).unwrap();
        let i13 = gaussian_mi(&z1, &z3).unwrap();
        if i13 <= i12 + 0.05 {
            ok += 1;
        }
    }
    assert!(ok >= 90, "DPI held in {ok}/100 seeds");
}

#[test]
fn knn_estimator_also_respects_chain_screening() {
    let mut r = rng::stream(5, &[0xd2]);
    let n = 800;
    let z1: Vec<f64> = (0..n).map(|_| rng::standard_normal(&mut r)).collect();
    let z2: Vec<f64> = z1.iter().map(|&v| 0.9 * v + 0.4 * rng::standard_normal(&mut r)).collect();
    let z3: Vec<f64> = z2.iter().map(|&v| 0.9 * v + 0.4 * rng::standard_normal(&mut r)).collect();
    let cfg = EstimatorConfig {
        regressor: d2c_core::estimator::Regressor::Knn,
        ..Default::default()
    };
    let screened = cond_mi(&z1, &z3, &[&z2], &cfg).unwrap();
    let open = cond_mi(&z1, &z3, &[], &cfg).unwrap();
    assert!(open > 0.2, "open path invisible to knn: {open}");
    assert!(screened < open * 0.3, "screening failed: {screened} vs {open}");
}

fn series_strategy() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (5usize..60).prop_flat_map(|n| {
        (
            prop::collection::vec(-1e3..1e3f64, n),
            prop::collection::vec(-1e3..1e3f64, n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn gaussian_mi_symmetric_bitwise((x, y) in series_strategy()) {
        if let (Ok(a), Ok(b)) = (gaussian_mi(&x, &y), gaussian_mi(&y, &x)) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn estimates_are_nonnegative((x, y) in series_strategy()) {
        if let Ok(v) = gaussian_mi(&x, &y) {
            prop_assert!(v >= 0.0);
        }
        let cfg = EstimatorConfig::default();
        if let Ok(v) = cond_mi(&x, &y, &[], &cfg) {
            prop_assert!(v >= 0.0);
        }
    }

    #[test]
    fn gaussian_mi_affine_invariant(
        (x, y) in series_strategy(),
        a in prop_oneof![0.05..20.0f64, -20.0..-0.05f64],
        b in -100.0..100.0f64,
    ) {
        let xs: Vec<f64> = x.iter().map(|&v| a * v + b).collect();
        if let (Ok(base), Ok(scaled)) = (gaussian_mi(&x, &y), gaussian_mi(&xs, &y)) {
            prop_assert!((base - scaled).abs() < 1e-10, "{} vs {}", base, scaled);
        }
    }

    #[test]
    fn cond_mi_symmetric_bitwise_with_conditioning((x, y) in series_strategy(), seed in 0u64..1000) {
        let mut r = rng::stream(seed, &[0xcc]);
        let c: Vec<f64> = (0..x.len()).map(|_| r.gen_range(-1.0..1.0)).collect();
        let cfg = EstimatorConfig::default();
        if let (Ok(a), Ok(b)) = (cond_mi(&x, &y, &[&c], &cfg), cond_mi(&y, &x, &[&c], &cfg)) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
