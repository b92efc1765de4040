//! Scalar pieces of the log-approximated cardinality penalty.

use crate::matcore::SymMatrix;

/// Machine precision, the default approximation parameter ε.
pub const MACHINE_EPSILON: f64 = f64::EPSILON;

/// `ρε = ρ̃ / ln(1 + 1/ε)`.
pub fn rho_eps(rho_tilde: f64, epsilon: f64) -> f64 {
    if rho_tilde == 0.0 {
        return 0.0;
    }
    rho_tilde / (1.0 / epsilon).ln_1p()
}

/// `‖x‖ε = Σ ln(1 + |x_i|/ε) / ln(1 + 1/ε)`, a smooth surrogate for `‖x‖₀`.
pub fn approx_norm(x: &[f64], epsilon: f64) -> f64 {
    let denom = (1.0 / epsilon).ln_1p();
    x.iter().map(|v| (v.abs() / epsilon).ln_1p()).sum::<f64>() / denom
}

/// MM weights `w_i = 1 / (|x_i| + ε)`.
pub fn weights(x: &[f64], epsilon: f64) -> Vec<f64> {
    x.iter().map(|v| 1.0 / (v.abs() + epsilon)).collect()
}

/// `L(x) = ρε Σ ln(ε + |x_i|) − xᵀAx`, the quantity driven down monotonically
/// by the MM iterations.
pub fn penalized_objective(x: &[f64], a: &SymMatrix, rho_eps: f64, epsilon: f64) -> f64 {
    let log_term = if rho_eps == 0.0 {
        0.0
    } else {
        rho_eps * x.iter().map(|v| (epsilon + v.abs()).ln()).sum::<f64>()
    };
    log_term - a.quad_form(x)
}

/// Number of entries with `|x_i| > zero_tol`.
pub fn cardinality(x: &[f64], zero_tol: f64) -> usize {
    x.iter().filter(|v| v.abs() > zero_tol).count()
}

/// Support indices `{i : |x_i| > zero_tol}`.
pub fn support(x: &[f64], zero_tol: f64) -> Vec<usize> {
    x.iter()
        .enumerate()
        .filter(|(_, v)| v.abs() > zero_tol)
        .map(|(i, _)| i)
        .collect()
}

/// Soft-threshold `[|c| − t]₊ sign(c)`; exactly zero at the boundary `|c| = t`.
#[inline]
pub fn soft_threshold(c: f64, t: f64) -> f64 {
    let m = c.abs() - t;
    if m > 0.0 {
        m.copysign(c)
    } else {
        0.0
    }
}
