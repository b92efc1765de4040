//! Convex subproblems solved at every MM iteration.
//!
//! With `τ = 0` the step maximizes `cᵀx − (ρε/2)‖Wx‖₁` over the ellipsoid
//! `xᵀBx ≤ 1`; with `τ > 0` it minimizes `‖x − s‖² + λ‖Wx‖₁` over the same
//! set. Diagonal `B` admits coordinate-wise closed forms, everything else goes
//! through two-block ADMM whose second block is the ellipsoid projection.

use crate::error::{Error, Result};
use crate::matcore::{dot, norm2, EllipsoidProjector, SpdFactor, SymMatrix};

use super::penalty::soft_threshold;

/// ADMM knobs. Residual balancing doubles or halves the penalty whenever one
/// residual exceeds the other by `balance_ratio`.
#[derive(Debug, Clone)]
pub struct AdmmSettings {
    pub rho: f64,
    pub max_iter: usize,
    pub tol: f64,
    pub balance_ratio: f64,
}

impl Default for AdmmSettings {
    fn default() -> Self {
        Self {
            rho: 1.0,
            max_iter: 5000,
            tol: 1e-8,
            balance_ratio: 10.0,
        }
    }
}

/// Solver for both subproblem families on a fixed constraint matrix `B`.
///
/// Keeps the ADMM dual state between calls so successive outer iterations
/// warm-start from the previous subproblem.
#[derive(Debug)]
pub struct QcqpSolver<'a> {
    b: &'a SymMatrix,
    factor: &'a SpdFactor,
    diag: Option<Vec<f64>>,
    projector: Option<EllipsoidProjector>,
    pub settings: AdmmSettings,
    warm: Option<(Vec<f64>, Vec<f64>, f64)>,
    pub last_admm_iterations: usize,
}

impl<'a> QcqpSolver<'a> {
    pub fn new(b: &'a SymMatrix, factor: &'a SpdFactor, settings: AdmmSettings) -> Self {
        let diag = b.is_diagonal().then(|| b.diagonal());
        Self {
            b,
            factor,
            diag,
            projector: None,
            settings,
            warm: None,
            last_admm_iterations: 0,
        }
    }

    /// Reuses an existing projector for `B` instead of decomposing again.
    pub fn with_projector(mut self, projector: EllipsoidProjector) -> Self {
        self.projector = Some(projector);
        self
    }

    pub fn is_diagonal(&self) -> bool {
        self.diag.is_some()
    }

    fn projector(&mut self) -> Result<&EllipsoidProjector> {
        if self.projector.is_none() {
            self.projector = Some(EllipsoidProjector::new(self.b)?);
        }
        Ok(self.projector.as_ref().expect("initialized above"))
    }

    /// `argmax cᵀx − (ρε/2)‖Wx‖₁ s.t. xᵀBx ≤ 1`.
    pub fn tau_zero(&mut self, c: &[f64], w: &[f64], rho_eps: f64) -> Result<Vec<f64>> {
        if let Some(d) = &self.diag {
            return Ok(tau_zero_diagonal(c, w, rho_eps, d));
        }
        if rho_eps == 0.0 {
            // max cᵀx over the ellipsoid: B⁻¹c / ‖c‖_{B⁻¹}
            let y = self.factor.solve(c);
            let q = dot(c, &y);
            if q <= 0.0 {
                return Ok(vec![0.0; c.len()]);
            }
            return Ok(y.iter().map(|v| v / q.sqrt()).collect());
        }
        self.tau_zero_admm(c, w, rho_eps)
    }

    /// ADMM path for the `τ = 0` subproblem, usable for any `B`.
    pub fn tau_zero_admm(&mut self, c: &[f64], w: &[f64], rho_eps: f64) -> Result<Vec<f64>> {
        let n = c.len();
        let t = 0.5 * rho_eps;
        let settings = self.settings.clone();
        let (mut z, mut u, mut rho) = self.take_warm(n);
        let mut x = vec![0.0; n];
        let mut converged = false;
        let mut iters = 0;
        for k in 0..settings.max_iter {
            iters = k + 1;
            for i in 0..n {
                x[i] = soft_threshold(z[i] - u[i] + c[i] / rho, t * w[i] / rho);
            }
            let xu: Vec<f64> = x.iter().zip(&u).map(|(a, b)| a + b).collect();
            let z_new = self.projector()?.project(&xu)?;
            let (r, s) = residuals(&x, &z, &z_new, rho);
            z = z_new;
            for i in 0..n {
                u[i] += x[i] - z[i];
            }
            if r <= settings.tol && s <= settings.tol {
                converged = true;
                break;
            }
            rebalance(&mut rho, &mut u, r, s, settings.balance_ratio);
        }
        self.last_admm_iterations = iters;
        if !converged {
            self.warm = None;
            return Err(Error::MaxSubIterations {
                iterations: settings.max_iter,
            });
        }
        self.warm = Some((z, u, rho));
        // objective is positively homogeneous: optimum is 0 or on the boundary
        let phi = dot(c, &x) - t * x.iter().zip(w).map(|(a, b)| a.abs() * b).sum::<f64>();
        if phi <= 0.0 || x.iter().all(|v| *v == 0.0) {
            return Ok(vec![0.0; n]);
        }
        let q = self.b.quad_form(&x);
        Ok(x.iter().map(|v| v / q.sqrt()).collect())
    }

    /// `argmin ‖x − s‖² + λ‖Wx‖₁ s.t. xᵀBx ≤ 1`.
    pub fn tau_pos(&mut self, s: &[f64], w: &[f64], lambda: f64) -> Result<Vec<f64>> {
        if self.diag.is_some() || lambda == 0.0 {
            let v: Vec<f64> = s
                .iter()
                .zip(w)
                .map(|(si, wi)| soft_threshold(*si, 0.5 * lambda * wi))
                .collect();
            return self.projector()?.project(&v);
        }
        self.tau_pos_admm(s, w, lambda)
    }

    /// ADMM path for the `τ > 0` subproblem, usable for any `B`.
    pub fn tau_pos_admm(&mut self, s: &[f64], w: &[f64], lambda: f64) -> Result<Vec<f64>> {
        let n = s.len();
        let settings = self.settings.clone();
        let (mut z, mut u, mut rho) = self.take_warm(n);
        let mut x = vec![0.0; n];
        let mut converged = false;
        let mut iters = 0;
        for k in 0..settings.max_iter {
            iters = k + 1;
            let denom = 2.0 + rho;
            for i in 0..n {
                let center = (2.0 * s[i] + rho * (z[i] - u[i])) / denom;
                x[i] = soft_threshold(center, lambda * w[i] / denom);
            }
            let xu: Vec<f64> = x.iter().zip(&u).map(|(a, b)| a + b).collect();
            let z_new = self.projector()?.project(&xu)?;
            let (r, sd) = residuals(&x, &z, &z_new, rho);
            z = z_new;
            for i in 0..n {
                u[i] += x[i] - z[i];
            }
            if r <= settings.tol && sd <= settings.tol {
                converged = true;
                break;
            }
            rebalance(&mut rho, &mut u, r, sd, settings.balance_ratio);
        }
        self.last_admm_iterations = iters;
        if !converged {
            self.warm = None;
            return Err(Error::MaxSubIterations {
                iterations: settings.max_iter,
            });
        }
        self.warm = Some((z, u, rho));
        let q = self.b.quad_form(&x);
        if q > 1.0 {
            let f = 1.0 / q.sqrt();
            x.iter_mut().for_each(|v| *v *= f);
        }
        Ok(x)
    }

    fn take_warm(&mut self, n: usize) -> (Vec<f64>, Vec<f64>, f64) {
        match self.warm.take() {
            Some((z, u, rho)) if z.len() == n => (z, u, rho),
            _ => (vec![0.0; n], vec![0.0; n], self.settings.rho),
        }
    }

    pub fn reset_warm_start(&mut self) {
        self.warm = None;
    }
}

/// Closed form of the `τ = 0` step for `B = diag(b)`:
/// `x_i ∝ [|c_i| − (ρε/2)w_i]₊ sign(c_i) / b_i`, scaled onto the boundary.
pub fn tau_zero_diagonal(c: &[f64], w: &[f64], rho_eps: f64, b: &[f64]) -> Vec<f64> {
    let t = 0.5 * rho_eps;
    let mut x: Vec<f64> = c
        .iter()
        .zip(w)
        .zip(b)
        .map(|((ci, wi), bi)| soft_threshold(*ci, t * wi) / bi)
        .collect();
    let q: f64 = x.iter().zip(b).map(|(xi, bi)| bi * xi * xi).sum();
    if q > 0.0 {
        let f = 1.0 / q.sqrt();
        x.iter_mut().for_each(|v| *v *= f);
    }
    x
}

fn residuals(x: &[f64], z_old: &[f64], z_new: &[f64], rho: f64) -> (f64, f64) {
    let r = x
        .iter()
        .zip(z_new)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let s = rho
        * z_new
            .iter()
            .zip(z_old)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
    (r, s)
}

fn rebalance(rho: &mut f64, u: &mut [f64], r: f64, s: f64, ratio: f64) {
    // u is the scaled dual y/ρ, so it rescales inversely with ρ
    if r > ratio * s {
        *rho *= 2.0;
        u.iter_mut().for_each(|v| *v *= 0.5);
    } else if s > ratio * r {
        *rho *= 0.5;
        u.iter_mut().for_each(|v| *v *= 2.0);
    }
}

/// `τ = 0` subproblem as a free function; see [`QcqpSolver::tau_zero`].
pub fn subproblem_tau_zero(
    ax: &[f64],
    w: &[f64],
    rho_eps: f64,
    b: &SymMatrix,
    factor: &SpdFactor,
    sub_tol: f64,
) -> Result<Vec<f64>> {
    check_dims(ax, w, b)?;
    let settings = AdmmSettings {
        tol: sub_tol,
        ..AdmmSettings::default()
    };
    QcqpSolver::new(b, factor, settings).tau_zero(ax, w, rho_eps)
}

/// `τ > 0` subproblem as a free function; see [`QcqpSolver::tau_pos`].
pub fn subproblem_tau_pos(
    s: &[f64],
    w: &[f64],
    lambda: f64,
    b: &SymMatrix,
    factor: &SpdFactor,
    sub_tol: f64,
) -> Result<Vec<f64>> {
    check_dims(s, w, b)?;
    let settings = AdmmSettings {
        tol: sub_tol,
        ..AdmmSettings::default()
    };
    QcqpSolver::new(b, factor, settings).tau_pos(s, w, lambda)
}

fn check_dims(v: &[f64], w: &[f64], b: &SymMatrix) -> Result<()> {
    for len in [v.len(), w.len()] {
        if len != b.n() {
            return Err(Error::DimensionMismatch {
                expected: b.n(),
                found: len,
            });
        }
    }
    Ok(())
}

/// Objective of the `τ = 0` subproblem (to be maximized).
pub fn tau_zero_objective(x: &[f64], c: &[f64], w: &[f64], rho_eps: f64) -> f64 {
    dot(x, c) - 0.5 * rho_eps * x.iter().zip(w).map(|(a, b)| a.abs() * b).sum::<f64>()
}

/// Objective of the `τ > 0` subproblem (to be minimized).
pub fn tau_pos_objective(x: &[f64], s: &[f64], w: &[f64], lambda: f64) -> f64 {
    let d: Vec<f64> = x.iter().zip(s).map(|(a, b)| a - b).collect();
    let n = norm2(&d);
    n * n + lambda * x.iter().zip(w).map(|(a, b)| a.abs() * b).sum::<f64>()
}
