mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use sgev::matcore::full_eigen;
use sgev::sgev::{
    rho_eps, solve, tau_pos_objective, tau_zero_objective, variational_renormalization, weights,
    AdmmSettings, QcqpSolver, SgevConfig, SgevProblem,
};
use sgev::{Error, SpdFactor, SymMatrix};

/// Iterate `k` of a run, by replaying with `max_iter = k`.
fn iterate(problem: &SgevProblem, cfg: &SgevConfig, k: usize) -> Vec<f64> {
    solve(
        problem,
        &SgevConfig {
            max_iter: k,
            ..cfg.clone()
        },
    )
    .unwrap()
    .0
    .x
}

#[test]
fn recovers_lambda_max_at_zero_penalty() {
    let mut r = rng(21);
    for n in [3, 8, 15] {
        let a = random_symmetric(&mut r, n).shifted(3.0);
        let b = random_spd(&mut r, n, 0.4);
        let oracle = oracle_lambda_max(&a, &b);
        let problem = SgevProblem::new(a, b.clone()).unwrap();
        let cfg = SgevConfig {
            max_iter: 100_000,
            tol_step: 1e-10,
            ..SgevConfig::default()
        };
        let (sol, _) = solve(&problem, &cfg).unwrap();
        assert!((sol.objective - oracle).abs() <= 1e-6 * oracle.abs());
        assert!((quad(&b, &sol.x) - 1.0).abs() <= 1e-8);
    }
}

#[test]
fn tau_below_bound_is_rejected() {
    let a = SymMatrix::diagonal_from(&[1.0, -2.0]);
    let problem = SgevProblem::standard(a).unwrap();
    let cfg = SgevConfig {
        tau: Some(1.0),
        ..SgevConfig::default()
    };
    assert!(matches!(
        solve(&problem, &cfg),
        Err(Error::InvalidConfig(_))
    ));
}

#[test]
fn iterates_stay_feasible() {
    let mut r = rng(22);
    for k in 0..6 {
        let n = 6;
        let a = if k % 2 == 0 {
            random_psd(&mut r, n, n)
        } else {
            random_symmetric(&mut r, n)
        };
        let b = random_spd(&mut r, n, 0.5);
        let problem = SgevProblem::new(a, b.clone()).unwrap();
        let cfg = SgevConfig::with_rho(0.3);
        for l in 1..=15 {
            assert!(quad(&b, &iterate(&problem, &cfg, l)) <= 1.0 + 1e-8);
        }
    }
}

#[test]
fn admm_matches_closed_form_for_identity() {
    let mut r = rng(23);
    let eps = f64::EPSILON;
    let settings = AdmmSettings {
        tol: 1e-11,
        max_iter: 100_000,
        ..AdmmSettings::default()
    };
    for k in 0..100 {
        let n = r.gen_range(2..12);
        let b = SymMatrix::identity(n);
        let f = SpdFactor::new(&b).unwrap();
        let x0 = gaussian_vec(&mut r, n);
        let w = weights(&x0, eps);
        let rho = rho_eps(r.gen_range(0.05..2.0), eps);
        let mut solver = QcqpSolver::new(&b, &f, settings.clone());
        if k % 2 == 0 {
            let c = gaussian_vec(&mut r, n);
            let closed = solver.tau_zero(&c, &w, rho).unwrap();
            let admm = solver.tau_zero_admm(&c, &w, rho).unwrap();
            let (p, q) = (
                tau_zero_objective(&closed, &c, &w, rho),
                tau_zero_objective(&admm, &c, &w, rho),
            );
            assert!((p - q).abs() <= 1e-6 * p.abs().max(1.0), "{p} vs {q}");
        } else {
            let s: Vec<f64> = gaussian_vec(&mut r, n).iter().map(|v| 3.0 * v).collect();
            let lambda = r.gen_range(0.1..2.0) * rho;
            let closed = solver.tau_pos(&s, &w, lambda).unwrap();
            let admm = solver.tau_pos_admm(&s, &w, lambda).unwrap();
            let (p, q) = (
                tau_pos_objective(&closed, &s, &w, lambda),
                tau_pos_objective(&admm, &s, &w, lambda),
            );
            assert!((p - q).abs() <= 1e-6 * p.abs().max(1.0), "{p} vs {q}");
        }
    }
}

/// Renormalized variance on a support equals the best value over that
/// support found by dense enumeration of the reduced problem.
#[test]
fn renormalization_matches_reduced_eigenproblem() {
    let mut r = rng(24);
    let a = random_psd(&mut r, 7, 7);
    let b = random_spd(&mut r, 7, 0.5);
    let x = [0.3, 0.0, -0.2, 0.0, 0.0, 0.1, 0.0];
    let out = variational_renormalization(&x, &a, &b, 0.0).unwrap();
    assert_eq!(out.support, vec![0, 2, 5]);
    let sub = out.support.clone();
    let oracle = oracle_lambda_max(&a.submatrix(&sub), &b.submatrix(&sub));
    assert!((out.objective - oracle).abs() < 1e-10 * oracle);
    assert!(out
        .x
        .iter()
        .enumerate()
        .all(|(i, v)| sub.contains(&i) || *v == 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn penalized_objective_descends(seed in any::<u64>(), n in 2usize..10, rho in 0.0f64..1.5, indefinite in any::<bool>()) {
        let mut r = rng(seed);
        let a = if indefinite { random_symmetric(&mut r, n) } else { random_psd(&mut r, n, n) };
        let b = random_spd(&mut r, n, 0.5);
        let problem = SgevProblem::new(a, b).unwrap();
        let (_, trace) = solve(&problem, &SgevConfig::with_rho(rho)).unwrap();
        prop_assert!(trace.is_monotone(1e-8), "increase {}", trace.max_increase());
    }

    #[test]
    fn converged_runs_settle(seed in any::<u64>(), n in 2usize..10, rho in 0.0f64..1.0) {
        let mut r = rng(seed);
        let a = random_spd(&mut r, n, 0.1);
        let problem = SgevProblem::standard(a).unwrap();
        let cfg = SgevConfig::with_rho(rho);
        let (sol, trace) = solve(&problem, &cfg).unwrap();
        if sol.converged {
            prop_assert!(trace.final_step_norm().unwrap() < cfg.tol_step);
            let steps: Vec<f64> = trace.entries.iter().map(|e| e.step_norm).collect();
            let tail = &steps[steps.len().saturating_sub(10)..];
            // no sustained growth at the end of the run
            let rises = tail.windows(2).filter(|w| w[1] > w[0] * (1.0 + 1e-9) && w[1] > 1e-13).count();
            prop_assert!(rises <= tail.len() / 2, "tail {:?}", tail);
        }
    }

    #[test]
    fn renormalization_never_loses_variance(seed in any::<u64>(), n in 2usize..9, rho in 0.0f64..1.0) {
        let mut r = rng(seed);
        let a = random_psd(&mut r, n, n);
        let b = random_spd(&mut r, n, 0.5);
        let problem = SgevProblem::new(a.clone(), b.clone()).unwrap();
        let (sol, _) = solve(&problem, &SgevConfig::with_rho(rho)).unwrap();
        prop_assume!(sol.cardinality > 0);
        // compare on the boundary, where renormalized vectors live
        let scale = 1.0 / quad(&b, &sol.x).sqrt();
        let x: Vec<f64> = sol.x.iter().map(|v| v * scale).collect();
        let out = variational_renormalization(&x, &a, &b, 1e-9).unwrap();
        prop_assert!(out.objective >= quad(&a, &x) - 1e-9 * quad(&a, &x).abs().max(1.0));
    }

    #[test]
    fn cardinality_shrinks_along_the_path(seed in any::<u64>(), n in 4usize..10) {
        let mut r = rng(seed);
        let a = random_psd(&mut r, n, n);
        let init = full_eigen(&a).unwrap().vectors.swap_remove(0);
        let problem = SgevProblem::standard(a.clone()).unwrap();
        let hi = sgev::spca::rho_ceiling(&a, f64::EPSILON);
        let grid = sgev::spca::log_grid(hi * 1e-4, hi, 20);
        let cards: Vec<usize> = grid
            .iter()
            .map(|&rho| {
                let cfg = SgevConfig { init: Some(init.clone()), ..SgevConfig::with_rho(rho) };
                solve(&problem, &cfg).unwrap().0.cardinality
            })
            .collect();
        let ok = cards.windows(2).filter(|w| w[1] <= w[0]).count();
        prop_assert!(ok as f64 >= 0.95 * (cards.len() - 1) as f64, "path {:?}", cards);
    }
}
