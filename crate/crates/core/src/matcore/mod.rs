//! Dense symmetric linear algebra used by every solver.

mod cholesky;
mod eigen;
mod ellipsoid;
mod matrix;

pub use cholesky::{SpdFactor, PD_REL_TOL};
pub use eigen::{
    full_eigen, full_eigen_with, lambda_max, lambda_min, shifted_power_lambda_min, EigenPairs,
    JACOBI_CUTOFF, MAX_SWEEPS,
};
pub use ellipsoid::{project_ellipsoid, EllipsoidProjector, BOUNDARY_TOL};
pub use matrix::{
    align_sign, axpy, dist2, dot, norm2, scale, sub, Matrix, SymMatrix, SYMMETRY_TOL,
};

/// Generalized eigenpairs of `(A, B)` via whitening: eigenvalues of
/// `L⁻¹AL⁻ᵀ` with eigenvectors mapped back by `L⁻ᵀ`, so each vector has unit
/// `B`-norm.
pub fn generalized_eigen(a: &SymMatrix, b: &SymMatrix) -> crate::Result<EigenPairs> {
    let f = SpdFactor::new(b)?;
    let e = full_eigen(&f.whiten(a))?;
    let vectors = e.vectors.iter().map(|y| f.unwhiten(y)).collect();
    Ok(EigenPairs {
        values: e.values,
        vectors,
    })
}
