mod common;

use common::*;
use proptest::prelude::*;
use sgev::matcore::{
    full_eigen, generalized_eigen, lambda_min, project_ellipsoid, shifted_power_lambda_min,
};
use sgev::{SpdFactor, SymMatrix};

fn spd_for_props(seed: u64, n: usize) -> SymMatrix {
    // MMᵀ + n·1e−3·I
    let mut r = rng(seed);
    let m = gaussian_matrix(&mut r, n, n);
    SymMatrix::from_upper_fn(n, |i, j| {
        let s: f64 = (0..n).map(|k| m.get(i, k) * m.get(j, k)).sum();
        s + if i == j { n as f64 * 1e-3 } else { 0.0 }
    })
}

#[test]
fn matvec_matches_naive() {
    let mut r = rng(1);
    for n in [1, 2, 7, 31] {
        let a = random_symmetric(&mut r, n);
        let v = gaussian_vec(&mut r, n);
        let got = a.matvec(&v).unwrap();
        let want = naive_matvec(&a, &v);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() <= 1e-12 * (1.0 + w.abs()));
        }
    }
}

#[test]
fn cholesky_solve_matches_test_factor() {
    let mut r = rng(2);
    for n in [1, 3, 12, 40] {
        let b = random_spd(&mut r, n, 0.1);
        let rhs = gaussian_vec(&mut r, n);
        let ours = SpdFactor::new(&b).unwrap().solve(&rhs);
        let oracle = spd_solve(&b, &rhs);
        let scale = oracle.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        for (a, b) in ours.iter().zip(&oracle) {
            assert!((a - b).abs() <= 1e-10 * scale);
        }
    }
}

#[test]
fn eigenpairs_satisfy_definition() {
    let mut r = rng(3);
    for n in [2, 5, 17, 60] {
        let a = random_symmetric(&mut r, n);
        let e = full_eigen(&a).unwrap();
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        for (l, v) in e.values.iter().zip(&e.vectors) {
            let av = naive_matvec(&a, v);
            let res: f64 = av
                .iter()
                .zip(v)
                .map(|(p, q)| (p - l * q).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(res <= 1e-9 * (1.0 + l.abs()), "residual {res}");
            assert!((norm(v) - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn generalized_pairs_are_b_normalized() {
    let mut r = rng(4);
    let a = random_symmetric(&mut r, 9);
    let b = random_spd(&mut r, 9, 0.3);
    let e = generalized_eigen(&a, &b).unwrap();
    assert!((e.values[0] - oracle_lambda_max(&a, &b)).abs() < 1e-10 * (1.0 + e.values[0].abs()));
    for (l, v) in e.values.iter().zip(&e.vectors) {
        assert!((quad(&b, v) - 1.0).abs() < 1e-10);
        let av = naive_matvec(&a, v);
        let bv = naive_matvec(&b, v);
        assert!(av.iter().zip(&bv).all(|(p, q)| (p - l * q).abs() < 1e-8));
    }
}

#[test]
fn lambda_min_routes_agree() {
    let mut r = rng(5);
    let a = random_symmetric(&mut r, 25);
    let jac = lambda_min(&a).unwrap();
    let pow = shifted_power_lambda_min(&a, 1e-12, 1_000_000).unwrap();
    assert!(
        (jac - pow).abs() < 1e-6 * (1.0 + jac.abs()),
        "{jac} vs {pow}"
    );
}

#[test]
fn asymmetric_and_nonfinite_rejected() {
    assert!(SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.5, 1.0]]).is_err());
    assert!(SymMatrix::from_rows(&[vec![f64::NAN, 0.0], vec![0.0, 1.0]]).is_err());
    assert!(SpdFactor::new(&SymMatrix::diagonal_from(&[1.0, -1.0])).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matvec_is_self_adjoint(seed in any::<u64>(), n in 1usize..25) {
        let mut r = rng(seed);
        let s = random_symmetric(&mut r, n);
        let v = gaussian_vec(&mut r, n);
        let w = gaussian_vec(&mut r, n);
        let lhs = dot(&s.matvec(&v).unwrap(), &w);
        let rhs = dot(&s.matvec(&w).unwrap(), &v);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn cholesky_reconstructs(seed in any::<u64>(), n in 1usize..25) {
        let b = spd_for_props(seed, n);
        let f = SpdFactor::new(&b).unwrap();
        let back = f.reconstruct();
        let dev = (0..n * n).map(|k| (back.as_slice()[k] - b.as_slice()[k]).abs()).fold(0.0, f64::max);
        prop_assert!(dev <= 1e-10 * b.max_abs());
    }

    #[test]
    fn eigen_trace_and_determinant(seed in any::<u64>(), n in 1usize..=20) {
        let mut r = rng(seed);
        let s = random_symmetric(&mut r, n);
        let e = full_eigen(&s).unwrap();
        let sum: f64 = e.values.iter().sum();
        prop_assert!((sum - s.trace()).abs() <= 1e-8 * (1.0 + s.trace().abs().max(s.max_abs() * n as f64)));
        // determinant of S + cI from its Cholesky factor
        let c = 1.0 - e.values[n - 1];
        let shifted = s.shifted(c);
        let l = cholesky(&shifted);
        let log_det: f64 = (0..n).map(|i| 2.0 * l[i][i].ln()).sum();
        let log_prod: f64 = e.values.iter().map(|v| (v + c).ln()).sum();
        prop_assert!((log_det - log_prod).abs() <= 1e-8 * (1.0 + log_det.abs()));
    }

    #[test]
    fn projection_invariants(seed in any::<u64>(), n in 1usize..12, scale in 0.05f64..30.0) {
        let mut r = rng(seed);
        let b = random_spd(&mut r, n, 0.2);
        let s: Vec<f64> = gaussian_vec(&mut r, n).iter().map(|v| v * scale).collect();
        let x = project_ellipsoid(&s, &b).unwrap();
        prop_assert!(quad(&b, &x) <= 1.0 + 1e-9);
        if quad(&b, &s) <= 1.0 {
            prop_assert_eq!(&x, &s);
        }
        let again = project_ellipsoid(&x, &b).unwrap();
        let dev = x.iter().zip(&again).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        prop_assert!(dev <= 1e-10);
    }
}
