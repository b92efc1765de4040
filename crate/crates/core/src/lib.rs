//! Sparse generalized eigenvalue solvers.
//!
//! The core routine maximizes `xᵀAx` subject to `xᵀBx ≤ 1` with a log-based
//! sparsity penalty, solved as a sequence of convex subproblems by
//! majorization-minimization. Sparse PCA, sparse CCA and sparse Fisher
//! discriminant analysis are built as specializations on top of it.
//!
//! Module map:
//!
//! * [`matcore`]: dense symmetric linear algebra (Cholesky, Jacobi
//!   eigensolver, ellipsoid projection).
//! * [`sgev`]: the general sparse GEV engine and its subproblem solvers.
//! * [`spca`]: DC-PCA, baselines, deflation and trade-off sweeps.
//! * [`scca`]: block assembly for CCA, multi-pair extraction and retrieval scoring.
//! * [`sfda`]: sparse Fisher discriminant directions.
//! * [`io`]: CSV ingestion, fixtures and result records.
//! * [`cli`]: the `sgev` command-line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod error;
pub mod io;
pub mod matcore;
pub mod scca;
pub mod sfda;
pub mod sgev;
pub mod spca;

pub use error::{Error, Result};
pub use matcore::{EigenPairs, Matrix, SpdFactor, SymMatrix};
