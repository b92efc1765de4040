//! Sparse Fisher discriminant analysis.
//!
//! With `A = aaᵀ` rank one the generalized eigenproblem reduces to
//! `min xᵀBx s.t. aᵀx = 1`. Sparsity enters through a weighted ℓ1 term whose
//! weights are refreshed by majorization-minimization, so each outer step is
//! a convex QP, solved here by ADMM with the equality constraint kept inside
//! the quadratic block.

use crate::error::{Error, Result};
use crate::matcore::{dist2, dot, norm2, SpdFactor, SymMatrix};
use crate::sgev::{
    cardinality, rho_eps, soft_threshold, weights, SgevConfig, SgevTrace, TraceEntry,
};

#[derive(Debug, Clone, PartialEq)]
pub struct FdaInput {
    pub mu1: Vec<f64>,
    pub mu2: Vec<f64>,
    pub s1: SymMatrix,
    pub s2: SymMatrix,
}

impl FdaInput {
    pub fn new(mu1: Vec<f64>, mu2: Vec<f64>, s1: SymMatrix, s2: SymMatrix) -> Result<Self> {
        let n = mu1.len();
        for d in [mu2.len(), s1.n(), s2.n()] {
            if d != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: d,
                });
            }
        }
        if mu1 == mu2 {
            return Err(Error::InvalidInput("class means coincide".into()));
        }
        Ok(Self { mu1, mu2, s1, s2 })
    }

    /// `a = μ1 − μ2`.
    pub fn a(&self) -> Vec<f64> {
        self.mu1.iter().zip(&self.mu2).map(|(p, q)| p - q).collect()
    }

    /// `B = Σ1 + Σ2`.
    pub fn b(&self) -> SymMatrix {
        self.s1
            .add_scaled(&self.s2, 1.0)
            .expect("dimensions checked at construction")
    }

    /// `B`, with a ridge `γ·tr(B)/n·I` when it is not positive definite.
    pub fn b_regularized(&self, gamma: f64) -> Result<SymMatrix> {
        let b = self.b();
        if SpdFactor::new(&b).is_ok() {
            return Ok(b);
        }
        let bump = gamma * b.trace().abs().max(f64::MIN_POSITIVE) / b.n().max(1) as f64;
        log::info!("B is not positive definite; adding ridge {bump:e}");
        Ok(b.shifted(bump))
    }
}

/// `B⁻¹a / (aᵀB⁻¹a)`, the minimizer of `xᵀBx` on `aᵀx = 1`.
pub fn fda_direction(a: &[f64], b: &SymMatrix, factor: &SpdFactor) -> Result<Vec<f64>> {
    if a.len() != b.n() || factor.n() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: b.n(),
            found: a.len(),
        });
    }
    if a.iter().all(|v| *v == 0.0) {
        return Err(Error::InvalidInput(
            "discriminant direction a is zero".into(),
        ));
    }
    let y = factor.solve(a);
    let s = dot(a, &y);
    Ok(y.iter().map(|v| v / s).collect())
}

/// Weighted-ℓ1 QP `min xᵀBx + ν Σ w_i|x_i| s.t. aᵀx = 1` on fixed `(B, a)`.
#[derive(Debug)]
pub struct FdaQp<'a> {
    b: &'a SymMatrix,
    a: &'a [f64],
    pub tol: f64,
    pub max_iter: usize,
    kkt: Option<(f64, SpdFactor, Vec<f64>, f64)>,
    warm: Option<(Vec<f64>, Vec<f64>, f64)>,
}

impl<'a> FdaQp<'a> {
    pub fn new(b: &'a SymMatrix, a: &'a [f64], tol: f64, max_iter: usize) -> Self {
        Self {
            b,
            a,
            tol,
            max_iter,
            kkt: None,
            warm: None,
        }
    }

    /// Factor of `2B + ρI` together with `M⁻¹a` and `aᵀM⁻¹a`, refreshed only
    /// when `ρ` changes.
    fn kkt(&mut self, rho: f64) -> Result<&(f64, SpdFactor, Vec<f64>, f64)> {
        if self.kkt.as_ref().is_none_or(|k| k.0 != rho) {
            let m = self.b.scaled(2.0).shifted(rho);
            let f = SpdFactor::new(&m)?;
            let ma = f.solve(self.a);
            let ama = dot(self.a, &ma);
            self.kkt = Some((rho, f, ma, ama));
        }
        Ok(self.kkt.as_ref().expect("set above"))
    }

    /// `argmin xᵀBx + (ρ/2)‖x − v‖²  s.t. aᵀx = 1` via the bordered system.
    fn x_update(&mut self, v: &[f64], rho: f64) -> Result<Vec<f64>> {
        let a = self.a;
        let (_, f, ma, ama) = self.kkt(rho)?;
        let rv: Vec<f64> = v.iter().map(|x| rho * x).collect();
        let mrv = f.solve(&rv);
        let eta = (dot(a, &mrv) - 1.0) / ama;
        Ok(mrv.iter().zip(ma).map(|(p, q)| p - eta * q).collect())
    }

    pub fn solve(&mut self, w: &[f64], nu: f64) -> Result<Vec<f64>> {
        let n = self.b.n();
        if w.len() != n || self.a.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: w.len(),
            });
        }
        if nu == 0.0 {
            let f = SpdFactor::new(self.b)?;
            return fda_direction(self.a, self.b, &f);
        }
        let (mut z, mut u, mut rho) = match self.warm.take() {
            Some(s) => s,
            None => {
                let f = SpdFactor::new(self.b)?;
                (
                    fda_direction(self.a, self.b, &f)?,
                    vec![0.0; n],
                    2.0 * self.b.trace() / n as f64,
                )
            }
        };
        let mut x = z.clone();
        let mut converged = false;
        for _ in 0..self.max_iter {
            let v: Vec<f64> = z.iter().zip(&u).map(|(p, q)| p - q).collect();
            x = self.x_update(&v, rho)?;
            let z_old = z;
            z = x
                .iter()
                .zip(&u)
                .zip(w)
                .map(|((xi, ui), wi)| soft_threshold(xi + ui, nu * wi / rho))
                .collect();
            u.iter_mut()
                .zip(x.iter().zip(&z))
                .for_each(|(ui, (xi, zi))| *ui += xi - zi);
            let r = dist2(&x, &z);
            let s = rho * dist2(&z, &z_old);
            let scale = norm2(&x).max(1.0);
            if r <= self.tol * scale && s <= self.tol * scale {
                converged = true;
                break;
            }
            if r > 10.0 * s {
                rho *= 2.0;
                u.iter_mut().for_each(|v| *v *= 0.5);
            } else if s > 10.0 * r {
                rho *= 0.5;
                u.iter_mut().for_each(|v| *v *= 2.0);
            }
        }
        if !converged {
            self.warm = None;
            return Err(Error::MaxSubIterations {
                iterations: self.max_iter,
            });
        }
        self.warm = Some((z.clone(), u, rho));
        Ok(self.polish(&z, w, nu).unwrap_or_else(|| {
            let s = dot(self.a, &z);
            if s != 0.0 && z.iter().any(|v| *v != 0.0) {
                z.iter().map(|v| v / s).collect()
            } else {
                x
            }
        }))
    }

    /// Exact solution on the support and sign pattern of `z`, accepted only if
    /// it satisfies the full optimality conditions.
    fn polish(&self, z: &[f64], w: &[f64], nu: f64) -> Option<Vec<f64>> {
        let n = z.len();
        let idx: Vec<usize> = (0..n).filter(|&i| z[i] != 0.0).collect();
        if idx.is_empty() {
            return None;
        }
        let bs = self.b.submatrix(&idx).scaled(2.0);
        let f = SpdFactor::new(&bs).ok()?;
        let a_s: Vec<f64> = idx.iter().map(|&i| self.a[i]).collect();
        let g: Vec<f64> = idx.iter().map(|&i| nu * w[i] * z[i].signum()).collect();
        let ma = f.solve(&a_s);
        let mg = f.solve(&g);
        let ama = dot(&a_s, &ma);
        if !(ama > 0.0) {
            return None;
        }
        let eta = -(1.0 + dot(&a_s, &mg)) / ama;
        let xs: Vec<f64> = mg.iter().zip(&ma).map(|(p, q)| -p - eta * q).collect();
        if idx
            .iter()
            .zip(&xs)
            .any(|(&i, v)| v.signum() != z[i].signum() || *v == 0.0)
        {
            return None;
        }
        let mut x = vec![0.0; n];
        for (&i, v) in idx.iter().zip(&xs) {
            x[i] = *v;
        }
        let bx = self.b.apply(&x);
        for i in 0..n {
            if x[i] == 0.0 {
                let grad = 2.0 * bx[i] + eta * self.a[i];
                if grad.abs() > nu * w[i] * (1.0 + 1e-6) + 1e-9 {
                    return None;
                }
            }
        }
        Some(x)
    }
}

/// One MM step: `argmin xᵀBx + ν_ε Σ |x_i|/(|x_i⁽ˡ⁾| + ε) s.t. aᵀx = 1`.
pub fn sfda_step(
    b: &SymMatrix,
    a: &[f64],
    x_l: &[f64],
    nu_eps: f64,
    epsilon: f64,
    sub_tol: f64,
) -> Result<Vec<f64>> {
    if x_l.len() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: b.n(),
            found: x_l.len(),
        });
    }
    FdaQp::new(b, a, sub_tol, 5000).solve(&weights(x_l, epsilon), nu_eps)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FdaSolution {
    pub x: Vec<f64>,
    /// Fisher ratio `(aᵀx)² / xᵀBx`.
    pub fisher: f64,
    /// `xᵀBx + ν_ε Σ ln(ε + |x_i|)`.
    pub surrogate: f64,
    pub cardinality: usize,
    pub iterations: usize,
    pub converged: bool,
}

fn surrogate(x: &[f64], b: &SymMatrix, nu_eps: f64, epsilon: f64) -> f64 {
    let pen = if nu_eps == 0.0 {
        0.0
    } else {
        nu_eps * x.iter().map(|v| (epsilon + v.abs()).ln()).sum::<f64>()
    };
    b.quad_form(x) + pen
}

/// Sparse FDA by MM on the log penalty with `ν_ε = ν / ln(1 + 1/ε)`, started
/// from the dense direction. Uses `config` for ε, tolerances and caps.
pub fn sfda_solve(
    input: &FdaInput,
    nu: f64,
    config: &SgevConfig,
) -> Result<(FdaSolution, SgevTrace)> {
    config.validate()?;
    if !(nu >= 0.0) || !nu.is_finite() {
        return Err(Error::InvalidConfig("nu must be finite and >= 0".into()));
    }
    let a = input.a();
    let b = input.b_regularized(crate::scca::DEFAULT_RIDGE)?;
    let factor = SpdFactor::new(&b)?;
    let nu_eps = rho_eps(nu, config.epsilon);
    let eps = config.epsilon;
    let mut x = match &config.init {
        Some(v) => {
            if v.len() != a.len() {
                return Err(Error::DimensionMismatch {
                    expected: a.len(),
                    found: v.len(),
                });
            }
            if (dot(&a, v) - 1.0).abs() > 1e-8 {
                return Err(Error::InvalidConfig(
                    "initial point must satisfy a'x = 1".into(),
                ));
            }
            v.clone()
        }
        None => fda_direction(&a, &b, &factor)?,
    };
    let mut qp = FdaQp::new(&b, &a, config.sub_tol, config.max_sub_iter);
    let mut trace = SgevTrace {
        initial_objective: surrogate(&x, &b, nu_eps, eps),
        entries: Vec::new(),
    };
    let mut converged = false;
    let mut iterations = 0;
    for l in 0..config.max_iter {
        let next = qp
            .solve(&weights(&x, eps), nu_eps)
            .map_err(|e| Error::Subproblem {
                iteration: l,
                source: Box::new(e),
            })?;
        let step = dist2(&next, &x);
        x = next;
        iterations = l + 1;
        trace.entries.push(TraceEntry {
            penalized_objective: surrogate(&x, &b, nu_eps, eps),
            step_norm: step,
            cardinality: cardinality(&x, config.zero_tol),
        });
        if step < config.tol_step {
            converged = true;
            break;
        }
    }
    let sol = FdaSolution {
        fisher: dot(&a, &x).powi(2) / b.quad_form(&x),
        surrogate: surrogate(&x, &b, nu_eps, eps),
        cardinality: cardinality(&x, config.zero_tol),
        x,
        iterations,
        converged,
    };
    Ok((sol, trace))
}

/// Convex variant `min xᵀBx + ν‖x‖₁ s.t. aᵀx = 1`.
pub fn sfda_lasso(input: &FdaInput, nu: f64, sub_tol: f64) -> Result<Vec<f64>> {
    if !(nu >= 0.0) || !nu.is_finite() {
        return Err(Error::InvalidConfig("nu must be finite and >= 0".into()));
    }
    let a = input.a();
    let b = input.b_regularized(crate::scca::DEFAULT_RIDGE)?;
    let w = vec![1.0; a.len()];
    FdaQp::new(&b, &a, sub_tol, 20_000).solve(&w, nu)
}

/// Constraint form `min xᵀBx s.t. aᵀx = 1, ‖x‖₁ ≤ k`, mapped onto the
/// penalized form by bisection on `ν`. Returns `(ν, x)`.
pub fn sfda_l1_constrained(input: &FdaInput, k: f64, sub_tol: f64) -> Result<(f64, Vec<f64>)> {
    let a = input.a();
    let amax = a.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let floor = 1.0 / amax;
    if !(k >= floor * (1.0 + 1e-9)) {
        return Err(Error::InvalidConfig(format!(
            "l1 budget {k} is below the feasible minimum {floor}"
        )));
    }
    let l1 = |x: &[f64]| x.iter().map(|v| v.abs()).sum::<f64>();
    let x0 = sfda_lasso(input, 0.0, sub_tol)?;
    if l1(&x0) <= k {
        return Ok((0.0, x0));
    }
    let mut hi = input.b().trace().max(1e-12);
    let mut x_hi = sfda_lasso(input, hi, sub_tol)?;
    let mut guard = 0;
    while l1(&x_hi) > k {
        hi *= 2.0;
        x_hi = sfda_lasso(input, hi, sub_tol)?;
        guard += 1;
        if guard > 200 {
            return Err(Error::NoConvergence {
                what: "l1 budget bracket",
                iterations: guard,
            });
        }
    }
    let mut lo = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let x = sfda_lasso(input, mid, sub_tol)?;
        if l1(&x) <= k {
            hi = mid;
            x_hi = x;
        } else {
            lo = mid;
        }
    }
    Ok((hi, x_hi))
}
