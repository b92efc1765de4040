//! Deflation of a covariance matrix by already extracted components.

use crate::error::{Error, Result};
use crate::matcore::{dot, norm2, Matrix, SymMatrix};

/// Pivot below which Gram–Schmidt reports a rank collapse.
pub const GS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DeflationScheme {
    /// `(I − QQᵀ)A(I − QQᵀ)` with `Q` an orthonormal basis of the components.
    Projection,
    /// `A_t = A_{t−1} − (q_tᵀA_{t−1}q_t) q_t q_tᵀ` with `q_t` the component
    /// orthonormalized against its predecessors.
    #[default]
    OrthogonalizedHotelling,
}

/// Modified Gram–Schmidt.
pub fn orthonormalize(vectors: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    for (k, v) in vectors.iter().enumerate() {
        q.push(orthonormal_residual(&q, v).map_err(|e| match e {
            Error::RankCollapse { pivot, .. } => Error::RankCollapse { index: k, pivot },
            e => e,
        })?);
    }
    Ok(q)
}

/// Component of `v` orthogonal to the orthonormal set `q`, normalized.
pub fn orthonormal_residual(q: &[Vec<f64>], v: &[f64]) -> Result<Vec<f64>> {
    let mut r = v.to_vec();
    for u in q {
        if u.len() != r.len() {
            return Err(Error::DimensionMismatch {
                expected: r.len(),
                found: u.len(),
            });
        }
        let c = dot(u, &r);
        r.iter_mut().zip(u).for_each(|(a, b)| *a -= c * b);
    }
    let s = norm2(&r);
    if !(s >= GS_TOL) {
        return Err(Error::RankCollapse {
            index: q.len(),
            pivot: s,
        });
    }
    r.iter_mut().for_each(|a| *a /= s);
    Ok(r)
}

/// Projection deflation `(I − QQᵀ)A(I − QQᵀ)`.
pub fn deflate(a: &SymMatrix, found: &[Vec<f64>]) -> Result<SymMatrix> {
    let n = a.n();
    if found.is_empty() {
        return Err(Error::InvalidInput(
            "deflation needs at least one direction".into(),
        ));
    }
    for v in found {
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: v.len(),
            });
        }
    }
    let q = orthonormalize(found)?;
    let p = Matrix::from_fn(n, n, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        id - q.iter().map(|u| u[i] * u[j]).sum::<f64>()
    });
    Ok(a.congruence(&p))
}

/// One orthogonalized Hotelling step with an already orthonormalized `q`.
pub fn hotelling_deflate(a: &SymMatrix, q: &[f64]) -> Result<SymMatrix> {
    if q.len() != a.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            found: q.len(),
        });
    }
    let g = a.quad_form(q);
    Ok(a.rank_one_update(q, -g))
}
