mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use sgev::io::pitprops;
use sgev::matcore::{align_sign, full_eigen};
use sgev::sgev::{rho_eps, SgevConfig};
use sgev::spca::{
    dcpca_solve, dcpca_step, deflate, explained_variance, gpower_solve, log_grid, power_method,
    power_step, principal_components, rho_ceiling, scotlass_step, sweep, PcaConfig, PevConvention,
    SweepConfig,
};
use sgev::{Error, Matrix, SymMatrix};

#[test]
fn zero_penalty_is_the_power_method() {
    let mut r = rng(31);
    for _ in 0..10 {
        let n = r.gen_range(3..20);
        let a = random_psd(&mut r, n, n);
        let mut y = vec![1.0 / (n as f64).sqrt(); n];
        for k in 1..=30 {
            y = power_step(&a, &y).unwrap();
            let cfg = SgevConfig {
                max_iter: k,
                tol_step: 1e-300,
                ..SgevConfig::default()
            };
            let (sol, _) = dcpca_solve(&a, &cfg).unwrap();
            // the returned vector is sign-normalized
            let mut yk = y.clone();
            align_sign(&mut yk);
            let dev = sol
                .x
                .iter()
                .zip(&yk)
                .map(|(p, q)| (p - q).abs())
                .fold(0.0, f64::max);
            assert!(dev <= 1e-12, "step {k}: {dev}");
        }
    }
}

#[test]
fn power_method_finds_top_eigenvalue() {
    let mut r = rng(32);
    let a = random_spd(&mut r, 12, 0.1);
    let (l, v) = power_method(&a, 1e-12, 100_000).unwrap();
    let oracle = full_eigen(&a).unwrap().values[0];
    assert!((l - oracle).abs() < 1e-8 * oracle);
    assert!((norm(&v) - 1.0).abs() < 1e-12);
}

#[test]
fn pitprops_dense_first_component() {
    let a = pitprops();
    let cfg = PcaConfig::default();
    let set = principal_components(&a, &cfg).unwrap();
    let lmax = full_eigen(&a).unwrap().values[0];
    assert_eq!(set.cardinalities, vec![13]);
    assert!((set.variances[0] - lmax).abs() < 1e-8);
}

#[test]
fn adjusted_variance_never_exceeds_subspace() {
    let a = pitprops();
    let set = principal_components(&a, &PcaConfig::with_targets(vec![6, 2, 2, 1, 1, 1])).unwrap();
    let adj = explained_variance(&a, &set.loadings, PevConvention::Adjusted).unwrap();
    let sub = explained_variance(&a, &set.loadings, PevConvention::Subspace).unwrap();
    assert!(adj.cumulative <= sub.cumulative + 1e-12);
    let naive: f64 = set.loadings.iter().map(|v| quad(&a, v)).sum::<f64>() / a.trace();
    assert!(adj.cumulative <= naive + 1e-12);
}

#[test]
fn scotlass_can_revive_a_zero() {
    let a = SymMatrix::from_rows(&[vec![2.0, 1.5], vec![1.5, 2.0]]).unwrap();
    let x = scotlass_step(&a, &[1.0, 0.0], 1.0).unwrap();
    assert!(x[1] > 0.0);
    let y = dcpca_step(&a, &[1.0, 0.0], rho_eps(1.0, f64::EPSILON), f64::EPSILON).unwrap();
    assert_eq!(y[1], 0.0);
}

#[test]
fn gpower_zero_penalty_recovers_top_component() {
    let mut r = rng(33);
    let c = gaussian_matrix(&mut r, 30, 8);
    let a = c.gram();
    let (z, x) = gpower_solve(&c, 0.0, 1e-12, 100_000).unwrap();
    assert!((norm(&z) - 1.0).abs() < 1e-12);
    let v = full_eigen(&a).unwrap().vectors.swap_remove(0);
    assert!(angle(&x, &v) < 1e-5);
}

#[test]
fn target_cardinality_is_hit_exactly() {
    let a = pitprops();
    for k in [1, 4, 6, 9, 13] {
        let set = principal_components(&a, &PcaConfig::with_targets(vec![k])).unwrap();
        assert_eq!(set.cardinalities, vec![k]);
    }
    assert!(matches!(
        principal_components(&a, &PcaConfig::with_targets(vec![14])),
        Err(Error::InvalidConfig(_))
    ));
}

#[test]
fn sweep_points_respect_enumeration_bound() {
    let mut r = rng(34);
    for _ in 0..5 {
        let n = r.gen_range(5..=9);
        let a = random_psd(&mut r, n, n);
        let grid = log_grid(
            rho_ceiling(&a, f64::EPSILON) * 1e-4,
            rho_ceiling(&a, f64::EPSILON),
            25,
        );
        let curve = sweep(&a, &grid, &SweepConfig::default()).unwrap();
        for p in &curve.points {
            if p.cardinality > 0 {
                assert!(p.variance <= enumerate_best(&a, p.cardinality) * (1.0 + 1e-10));
            }
        }
        assert!(curve
            .points
            .windows(2)
            .all(|w| w[1].rho_tilde > w[0].rho_tilde));
    }
}

#[test]
fn csv_curve_has_one_line_per_point() {
    let a = pitprops();
    let grid = log_grid(1e-3, 10.0, 7);
    let curve = sweep(&a, &grid, &SweepConfig::default()).unwrap();
    let csv = curve.to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "rho,cardinality,pev");
    assert_eq!(lines.len(), 8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn zeros_stay_zero(seed in any::<u64>(), n in 2usize..12, rho in 1e-6f64..2.0) {
        let mut r = rng(seed);
        let a = random_psd(&mut r, n, n);
        let mut x = gaussian_vec(&mut r, n);
        x[0] = 0.0;
        for v in x.iter_mut().skip(1) {
            if r.gen_bool(0.3) {
                *v = 0.0;
            }
        }
        let eps = f64::EPSILON;
        let re = rho_eps(rho, eps);
        for _ in 0..20 {
            match dcpca_step(&a, &x, re, eps) {
                Ok(next) => {
                    prop_assert!(x.iter().zip(&next).all(|(p, q)| *p != 0.0 || *q == 0.0));
                    prop_assert!((norm(&next) - 1.0).abs() <= 1e-12);
                    x = next;
                }
                Err(Error::AllThresholded) => break,
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            }
        }
    }

    #[test]
    fn scotlass_iterates_are_unit(seed in any::<u64>(), n in 2usize..12, rho in 0.0f64..1.0) {
        let mut r = rng(seed);
        let a = random_psd(&mut r, n, n);
        let x = gaussian_vec(&mut r, n);
        if let Ok(y) = scotlass_step(&a, &x, rho) {
            prop_assert!((norm(&y) - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn projection_deflation_gives_orthogonal_components(seed in any::<u64>(), n in 3usize..10) {
        let mut r = rng(seed);
        let a = random_psd(&mut r, n, n);
        let first = principal_components(&a, &PcaConfig::with_targets(vec![(n / 2).max(1)]));
        prop_assume!(first.is_ok());
        let q = first.unwrap().loadings;
        let deflated = deflate(&a, &q).unwrap();
        let init = full_eigen(&deflated).unwrap().vectors.swap_remove(0);
        let cfg = SgevConfig { init: Some(init), ..SgevConfig::with_rho(0.0) };
        let (sol, _) = dcpca_solve(&deflated, &cfg).unwrap();
        prop_assert!(dot(&sol.x, &q[0]).abs() <= 1e-6, "inner product {}", dot(&sol.x, &q[0]));
    }
}

#[test]
fn gpower_rejects_negative_penalty() {
    let c = Matrix::zeros(3, 2);
    assert!(gpower_solve(&c, -1.0, 1e-8, 10).is_err());
}
