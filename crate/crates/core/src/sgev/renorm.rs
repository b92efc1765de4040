//! Variational renormalization: keep a solution's sparsity pattern and
//! re-solve the dense generalized eigenproblem restricted to that support.

use crate::error::{Error, Result};
use crate::matcore::{dot, generalized_eigen, SymMatrix};

use super::penalty::support;

#[derive(Debug, Clone, PartialEq)]
pub struct Renormalized {
    pub x: Vec<f64>,
    /// `λmax(A_k, B_k)` on the support `k`.
    pub objective: f64,
    pub support: Vec<usize>,
}

/// Replaces the support entries of `x` by the top generalized eigenvector of
/// `(A_k, B_k)`, unit in `B`-norm and signed to agree with `x`.
pub fn variational_renormalization(
    x: &[f64],
    a: &SymMatrix,
    b: &SymMatrix,
    zero_tol: f64,
) -> Result<Renormalized> {
    let n = a.n();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x.len(),
        });
    }
    if b.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: b.n(),
        });
    }
    let idx = support(x, zero_tol);
    if idx.is_empty() {
        return Err(Error::EmptySupport);
    }
    let eig = generalized_eigen(&a.submatrix(&idx), &b.submatrix(&idx))?;
    let (objective, u) = eig.max();
    let xk: Vec<f64> = idx.iter().map(|&i| x[i]).collect();
    let flip = if dot(u, &xk) < 0.0 { -1.0 } else { 1.0 };
    let mut out = vec![0.0; n];
    for (&i, ui) in idx.iter().zip(u) {
        out[i] = flip * ui;
    }
    Ok(Renormalized {
        x: out,
        objective,
        support: idx,
    })
}
