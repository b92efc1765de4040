//! DC-PCA and the closely related power, SCoTLASS and GPower iterations.

use crate::error::{Error, Result};
use crate::matcore::{align_sign, dist2, dot, lambda_min, norm2, Matrix, SpdFactor, SymMatrix};
use crate::sgev::{
    cardinality, penalized_objective, soft_threshold, SgevConfig, SgevSolution, SgevTrace,
    TraceEntry,
};

/// One DC-PCA update: weighted soft-threshold of `Ax` followed by ℓ2
/// normalization. Thresholded coordinates are exactly zero.
pub fn dcpca_step(a: &SymMatrix, x: &[f64], rho_eps: f64, epsilon: f64) -> Result<Vec<f64>> {
    let c = a.matvec(x)?;
    let t = 0.5 * rho_eps;
    let num: Vec<f64> = c
        .iter()
        .zip(x)
        .map(|(ci, xi)| soft_threshold(*ci, t / (xi.abs() + epsilon)))
        .collect();
    normalize_numerators(num)
}

/// SCoTLASS-style update: the same map with unit weights and threshold `ρ/2`.
pub fn scotlass_step(a: &SymMatrix, x: &[f64], rho: f64) -> Result<Vec<f64>> {
    let c = a.matvec(x)?;
    let num: Vec<f64> = c.iter().map(|ci| soft_threshold(*ci, 0.5 * rho)).collect();
    normalize_numerators(num)
}

fn normalize_numerators(mut num: Vec<f64>) -> Result<Vec<f64>> {
    let s = norm2(&num);
    if s == 0.0 {
        return Err(Error::AllThresholded);
    }
    num.iter_mut().for_each(|v| *v /= s);
    Ok(num)
}

/// `Ax / ‖Ax‖₂`.
pub fn power_step(a: &SymMatrix, x: &[f64]) -> Result<Vec<f64>> {
    let c = a.matvec(x)?;
    let s = norm2(&c);
    if s == 0.0 {
        return Err(Error::ZeroDirection);
    }
    Ok(c.iter().map(|v| v / s).collect())
}

/// Power method from the uniform unit vector. Stops once
/// `‖Av − λv‖₂ ≤ tol·(1 + λ)` and returns the Rayleigh quotient and `v`.
pub fn power_method(a: &SymMatrix, tol: f64, max_iter: usize) -> Result<(f64, Vec<f64>)> {
    let n = a.n();
    let x0 = vec![1.0 / (n as f64).sqrt(); n];
    power_method_from(a, &x0, tol, max_iter)
}

pub fn power_method_from(
    a: &SymMatrix,
    x0: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<(f64, Vec<f64>)> {
    let mut x = x0.to_vec();
    for _ in 0..max_iter {
        x = power_step(a, &x)?;
        let ax = a.apply(&x);
        let lambda = dot(&x, &ax);
        let r: f64 = ax
            .iter()
            .zip(&x)
            .map(|(p, q)| (p - lambda * q).powi(2))
            .sum::<f64>()
            .sqrt();
        if r <= tol * (1.0 + lambda.abs()) {
            align_sign(&mut x);
            return Ok((lambda, x));
        }
    }
    Err(Error::NoConvergence {
        what: "power method",
        iterations: max_iter,
    })
}

/// `B⁻¹Ax / √(xᵀAB⁻¹Ax)`, unit in `B`-norm.
pub fn generalized_power_step(
    a: &SymMatrix,
    b: &SymMatrix,
    factor: &SpdFactor,
    x: &[f64],
) -> Result<Vec<f64>> {
    if b.n() != a.n() || factor.n() != a.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            found: b.n(),
        });
    }
    let ax = a.matvec(x)?;
    if ax.iter().all(|v| *v == 0.0) {
        return Err(Error::ZeroDirection);
    }
    let y = factor.solve(&ax);
    let q = dot(&ax, &y);
    if !(q > 0.0) {
        return Err(Error::ZeroDirection);
    }
    let s = q.sqrt();
    Ok(y.iter().map(|v| v / s).collect())
}

fn gpower_scores(c: &Matrix, z: &[f64]) -> Result<Vec<f64>> {
    c.tr_matvec(z)
}

/// GPower ℓ0 update on `z ∈ ℝᵖ` for `A = CᵀC`, with `C` of size `p × n`.
pub fn gpower_step(c: &Matrix, z: &[f64], rho_tilde: f64) -> Result<Vec<f64>> {
    let t = gpower_scores(c, z)?;
    let mut out = vec![0.0; c.rows()];
    let mut any = false;
    for (i, ti) in t.iter().enumerate() {
        if ti * ti > rho_tilde {
            any = true;
            for (k, o) in out.iter_mut().enumerate() {
                *o += ti * c.get(k, i);
            }
        }
    }
    if !any {
        return Err(Error::ZeroUpdate);
    }
    let s = norm2(&out);
    if s == 0.0 {
        return Err(Error::ZeroUpdate);
    }
    out.iter_mut().for_each(|v| *v /= s);
    Ok(out)
}

/// Loadings recovered from a GPower fixed point `z`.
pub fn gpower_recover(c: &Matrix, z: &[f64], rho_tilde: f64) -> Result<Vec<f64>> {
    let t = gpower_scores(c, z)?;
    let mut x: Vec<f64> = t
        .iter()
        .map(|ti| if ti * ti > rho_tilde { *ti } else { 0.0 })
        .collect();
    let s = norm2(&x);
    if s == 0.0 {
        return Err(Error::ZeroUpdate);
    }
    x.iter_mut().for_each(|v| *v /= s);
    Ok(x)
}

/// Runs GPower to a fixed point from the normalized column of `C` with the
/// largest norm; returns `(z, x)`.
pub fn gpower_solve(
    c: &Matrix,
    rho_tilde: f64,
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = c.cols();
    let best = (0..n)
        .max_by(|&i, &j| norm2(&c.column(i)).total_cmp(&norm2(&c.column(j))))
        .ok_or(Error::EmptySupport)?;
    let mut z = c.column(best);
    let s = norm2(&z);
    if s == 0.0 {
        return Err(Error::ZeroUpdate);
    }
    z.iter_mut().for_each(|v| *v /= s);
    for _ in 0..max_iter {
        let next = gpower_step(c, &z, rho_tilde)?;
        let step = dist2(&next, &z);
        z = next;
        if step < tol {
            let x = gpower_recover(c, &z, rho_tilde)?;
            return Ok((z, x));
        }
    }
    Err(Error::NoConvergence {
        what: "gpower",
        iterations: max_iter,
    })
}

/// Warns when `A` is visibly indefinite; DC-PCA then proceeds with `τ = 0`.
pub fn check_psd(a: &SymMatrix) -> Result<()> {
    let n = a.n().max(1) as f64;
    let floor = -1e-8 * a.trace().abs() / n;
    let lmin = lambda_min(a)?;
    if lmin < floor {
        log::warn!(
            "matrix is not positive semidefinite (lambda_min = {lmin:e}); continuing with tau = 0"
        );
    }
    Ok(())
}

/// DC-PCA: iterates [`dcpca_step`] from `config.init` (uniform when unset)
/// until the step norm falls below `config.tol_step`.
pub fn dcpca_solve(a: &SymMatrix, config: &SgevConfig) -> Result<(SgevSolution, SgevTrace)> {
    config.validate()?;
    check_psd(a)?;
    dcpca_run(a, config)
}

pub(crate) fn dcpca_run(a: &SymMatrix, config: &SgevConfig) -> Result<(SgevSolution, SgevTrace)> {
    let n = a.n();
    let mut x = match &config.init {
        Some(v) => {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: v.len(),
                });
            }
            if dot(v, v) > 1.0 + 1e-12 {
                return Err(Error::InvalidConfig(
                    "initial point must have norm <= 1".into(),
                ));
            }
            v.clone()
        }
        None => vec![1.0 / (n as f64).sqrt(); n],
    };
    let rho_e = config.rho_eps();
    let eps = config.epsilon;
    let mut trace = SgevTrace {
        initial_objective: penalized_objective(&x, a, rho_e, eps),
        entries: Vec::with_capacity(config.max_iter.min(4096)),
    };
    let mut converged = false;
    let mut iterations = 0;
    for l in 0..config.max_iter {
        let (next, done) = match dcpca_step(a, &x, rho_e, eps) {
            Ok(v) => (v, false),
            Err(Error::AllThresholded) => (vec![0.0; n], true),
            Err(e) => return Err(e),
        };
        let step = dist2(&next, &x);
        x = next;
        iterations = l + 1;
        trace.entries.push(TraceEntry {
            penalized_objective: penalized_objective(&x, a, rho_e, eps),
            step_norm: step,
            cardinality: cardinality(&x, config.zero_tol),
        });
        if done || step < config.tol_step {
            converged = true;
            break;
        }
    }
    align_sign(&mut x);
    let sol = SgevSolution {
        objective: a.quad_form(&x),
        penalized_objective: penalized_objective(&x, a, rho_e, eps),
        cardinality: cardinality(&x, config.zero_tol),
        x,
        iterations,
        converged,
        tau: 0.0,
    };
    Ok((sol, trace))
}
