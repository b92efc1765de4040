//! The sparse generalized eigenvalue engine.
//!
//! Solves `max xᵀAx − ρ̃‖x‖ε  s.t. xᵀBx ≤ 1` by majorization-minimization:
//! the concave log penalty is linearized around the current iterate (giving
//! the weights `w_i = 1/(|x_i| + ε)`) and, when `A` is indefinite, the convex
//! part `xᵀ(A + τI)x` is linearized as well. Each step is then a convex
//! subproblem with a weighted ℓ1 term and the ellipsoid constraint.

mod penalty;
mod renorm;
mod subproblem;

use std::sync::OnceLock;

pub use penalty::{
    approx_norm, cardinality, penalized_objective, rho_eps, soft_threshold, support, weights,
    MACHINE_EPSILON,
};
pub use renorm::{variational_renormalization, Renormalized};
pub use subproblem::{
    subproblem_tau_pos, subproblem_tau_zero, tau_pos_objective, tau_zero_diagonal,
    tau_zero_objective, AdmmSettings, QcqpSolver,
};

use crate::error::{Error, Result};
use crate::matcore::{align_sign, dist2, lambda_min, EllipsoidProjector, SpdFactor, SymMatrix};

/// Slack allowed when validating a user-supplied `τ` against `−λmin(A)`.
pub const TAU_SLACK: f64 = 1e-9;

/// Objective/constraint pair `(A, B)` with `B` verified positive definite.
#[derive(Debug)]
pub struct SgevProblem {
    a: SymMatrix,
    b: SymMatrix,
    factor: SpdFactor,
    lambda_min_a: OnceLock<f64>,
    projector: OnceLock<EllipsoidProjector>,
}

impl SgevProblem {
    pub fn new(a: SymMatrix, b: SymMatrix) -> Result<Self> {
        if a.n() != b.n() {
            return Err(Error::DimensionMismatch {
                expected: a.n(),
                found: b.n(),
            });
        }
        let factor = SpdFactor::new(&b)?;
        Ok(Self {
            a,
            b,
            factor,
            lambda_min_a: OnceLock::new(),
            projector: OnceLock::new(),
        })
    }

    /// Standard eigenproblem `B = I`.
    pub fn standard(a: SymMatrix) -> Result<Self> {
        let n = a.n();
        Self::new(a, SymMatrix::identity(n))
    }

    pub fn a(&self) -> &SymMatrix {
        &self.a
    }

    pub fn b(&self) -> &SymMatrix {
        &self.b
    }

    pub fn factor(&self) -> &SpdFactor {
        &self.factor
    }

    pub fn n(&self) -> usize {
        self.a.n()
    }

    /// Same `B` (factor and projector reused) with a new objective matrix.
    pub fn with_a(&self, a: SymMatrix) -> Result<Self> {
        if a.n() != self.b.n() {
            return Err(Error::DimensionMismatch {
                expected: self.b.n(),
                found: a.n(),
            });
        }
        Ok(Self {
            a,
            b: self.b.clone(),
            factor: self.factor.clone(),
            lambda_min_a: OnceLock::new(),
            projector: self.projector.clone(),
        })
    }

    /// Records a known `λmin(A)` so it is not recomputed.
    pub fn with_lambda_min_a(self, value: f64) -> Self {
        let _ = self.lambda_min_a.set(value);
        self
    }

    /// `λmin(A)`, computed once.
    pub fn lambda_min_a(&self) -> Result<f64> {
        if let Some(v) = self.lambda_min_a.get() {
            return Ok(*v);
        }
        let v = lambda_min(&self.a)?;
        Ok(*self.lambda_min_a.get_or_init(|| v))
    }

    /// The smallest admissible shift, `max(0, −λmin(A))`.
    pub fn default_tau(&self) -> Result<f64> {
        Ok((-self.lambda_min_a()?).max(0.0))
    }

    fn projector(&self) -> Result<EllipsoidProjector> {
        if let Some(p) = self.projector.get() {
            return Ok(p.clone());
        }
        let p = EllipsoidProjector::new(&self.b)?;
        Ok(self.projector.get_or_init(|| p).clone())
    }

    /// Feasible uniform start `1 / √(1ᵀB1) · 1`.
    pub fn uniform_init(&self) -> Vec<f64> {
        let ones = vec![1.0; self.n()];
        let q = self.b.quad_form(&ones);
        vec![1.0 / q.sqrt(); self.n()]
    }
}

/// Hyperparameters of [`solve`].
#[derive(Debug, Clone, PartialEq)]
pub struct SgevConfig {
    /// Sparsity regularizer ρ̃ ≥ 0.
    pub rho_tilde: f64,
    /// Approximation parameter ε > 0.
    pub epsilon: f64,
    /// Shift τ; `None` selects `max(0, −λmin(A))`.
    pub tau: Option<f64>,
    pub max_iter: usize,
    /// Stop once `‖x⁽ˡ⁺¹⁾ − x⁽ˡ⁾‖₂ < tol_step`.
    pub tol_step: f64,
    /// ADMM primal/dual residual tolerance.
    pub sub_tol: f64,
    pub max_sub_iter: usize,
    /// Starting point; must satisfy `xᵀBx ≤ 1`. `None` means uniform.
    pub init: Option<Vec<f64>>,
    pub zero_tol: f64,
}

impl Default for SgevConfig {
    fn default() -> Self {
        Self {
            rho_tilde: 0.0,
            epsilon: MACHINE_EPSILON,
            tau: None,
            max_iter: 1000,
            tol_step: 1e-6,
            sub_tol: 1e-8,
            max_sub_iter: 5000,
            init: None,
            zero_tol: 1e-9,
        }
    }
}

impl SgevConfig {
    pub fn with_rho(rho_tilde: f64) -> Self {
        Self {
            rho_tilde,
            ..Self::default()
        }
    }

    pub fn rho_eps(&self) -> f64 {
        rho_eps(self.rho_tilde, self.epsilon)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if !(self.rho_tilde >= 0.0) || !self.rho_tilde.is_finite() {
            return bad("rho_tilde must be finite and >= 0");
        }
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return bad("epsilon must be finite and > 0");
        }
        if self.max_iter == 0 || self.max_sub_iter == 0 {
            return bad("iteration caps must be positive");
        }
        if !(self.tol_step > 0.0) || !(self.sub_tol > 0.0) {
            return bad("tolerances must be > 0");
        }
        if let Some(t) = self.tau {
            if !t.is_finite() {
                return bad("tau must be finite");
            }
        }
        if !(self.zero_tol >= 0.0) {
            return bad("zero_tol must be >= 0");
        }
        Ok(())
    }
}

/// Result of [`solve`].
#[derive(Debug, Clone, PartialEq)]
pub struct SgevSolution {
    pub x: Vec<f64>,
    /// `xᵀAx`.
    pub objective: f64,
    /// `ρε Σ ln(ε + |x_i|) − xᵀAx`.
    pub penalized_objective: f64,
    pub cardinality: usize,
    pub iterations: usize,
    pub converged: bool,
    /// Shift actually used.
    pub tau: f64,
}

impl SgevSolution {
    /// True when every loading was thresholded away.
    pub fn over_regularized(&self) -> bool {
        self.cardinality == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub penalized_objective: f64,
    pub step_norm: f64,
    pub cardinality: usize,
}

/// Per-iteration diagnostics.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SgevTrace {
    /// Penalized objective at the starting point.
    pub initial_objective: f64,
    pub entries: Vec<TraceEntry>,
}

impl SgevTrace {
    pub fn final_step_norm(&self) -> Option<f64> {
        self.entries.last().map(|e| e.step_norm)
    }

    /// Largest increase of the penalized objective between consecutive
    /// iterates (non-positive for a monotone run).
    pub fn max_increase(&self) -> f64 {
        let mut prev = self.initial_objective;
        let mut worst = f64::NEG_INFINITY;
        for e in &self.entries {
            worst = worst.max(e.penalized_objective - prev);
            prev = e.penalized_objective;
        }
        worst
    }

    pub fn is_monotone(&self, slack: f64) -> bool {
        self.entries.is_empty() || self.max_increase() <= slack
    }
}

/// Runs the sparse GEV iteration.
///
/// With `τ = 0` each step solves `max xᵀAx⁽ˡ⁾ − (ρε/2)‖W⁽ˡ⁾x‖₁` over the
/// ellipsoid; with `τ > 0` it solves
/// `min ‖x − (A/τ + I)x⁽ˡ⁾‖² + (ρε/τ)‖W⁽ˡ⁾x‖₁`. Terminates when the step norm
/// drops below `tol_step` (converged) or after `max_iter` steps.
pub fn solve(problem: &SgevProblem, config: &SgevConfig) -> Result<(SgevSolution, SgevTrace)> {
    config.validate()?;
    let n = problem.n();
    let min_tau = problem.default_tau()?;
    let tau = match config.tau {
        Some(t) if t < min_tau - TAU_SLACK => {
            return Err(Error::InvalidConfig(format!(
                "tau = {t} is below max(0, -lambda_min(A)) = {min_tau}"
            )));
        }
        Some(t) => t.max(0.0),
        None => min_tau,
    };
    let mut x = match &config.init {
        Some(v) => {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: v.len(),
                });
            }
            if problem.b.quad_form(v) > 1.0 + 1e-12 {
                return Err(Error::InvalidConfig(
                    "initial point violates x'Bx <= 1".into(),
                ));
            }
            v.clone()
        }
        None => problem.uniform_init(),
    };

    let rho_e = config.rho_eps();
    let eps = config.epsilon;
    let settings = AdmmSettings {
        tol: config.sub_tol,
        max_iter: config.max_sub_iter,
        ..AdmmSettings::default()
    };
    let mut qcqp = QcqpSolver::new(&problem.b, &problem.factor, settings);
    let needs_projector = tau > 0.0 || (!qcqp.is_diagonal() && rho_e > 0.0);
    if needs_projector {
        qcqp = qcqp.with_projector(problem.projector()?);
    }

    let mut trace = SgevTrace {
        initial_objective: penalized_objective(&x, &problem.a, rho_e, eps),
        entries: Vec::with_capacity(config.max_iter.min(4096)),
    };
    let mut converged = false;
    let mut iterations = 0;
    for l in 0..config.max_iter {
        let w = weights(&x, eps);
        let ax = problem.a.apply(&x);
        let next = if tau == 0.0 {
            qcqp.tau_zero(&ax, &w, rho_e)
        } else {
            let s: Vec<f64> = ax.iter().zip(&x).map(|(a, xi)| a / tau + xi).collect();
            qcqp.tau_pos(&s, &w, rho_e / tau)
        }
        .map_err(|e| Error::Subproblem {
            iteration: l,
            source: Box::new(e),
        })?;

        let step = dist2(&next, &x);
        x = next;
        iterations = l + 1;
        trace.entries.push(TraceEntry {
            penalized_objective: penalized_objective(&x, &problem.a, rho_e, eps),
            step_norm: step,
            cardinality: cardinality(&x, config.zero_tol),
        });
        if x.iter().all(|v| *v == 0.0) || step < config.tol_step {
            converged = true;
            break;
        }
    }

    align_sign(&mut x);
    let solution = SgevSolution {
        objective: problem.a.quad_form(&x),
        penalized_objective: penalized_objective(&x, &problem.a, rho_e, eps),
        cardinality: cardinality(&x, config.zero_tol),
        x,
        iterations,
        converged,
        tau,
    };
    Ok((solution, trace))
}
