use super::matrix::{Matrix, SymMatrix};
use crate::error::{Error, Result};

/// Relative pivot floor: a pivot must exceed `PD_REL_TOL · trace(B) / n`.
pub const PD_REL_TOL: f64 = 1e-12;

/// Lower-triangular Cholesky factor `L` with `B = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct SpdFactor {
    n: usize,
    // row-major, upper triangle zero
    l: Vec<f64>,
}

impl SpdFactor {
    /// Factorizes `b`, failing with [`Error::NotPositiveDefinite`] when a
    /// pivot drops to `PD_REL_TOL · trace(b)/n` or below.
    pub fn new(b: &SymMatrix) -> Result<Self> {
        let n = b.n();
        let tol = if n == 0 {
            0.0
        } else {
            (PD_REL_TOL * b.trace() / n as f64).max(0.0)
        };
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut d = b.get(j, j);
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if !(d > tol) {
                return Err(Error::NotPositiveDefinite { index: j, pivot: d });
            }
            let djj = d.sqrt();
            l[j * n + j] = djj;
            for i in (j + 1)..n {
                let mut s = b.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / djj;
            }
        }
        Ok(Self { n, l })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn l(&self, i: usize, j: usize) -> f64 {
        self.l[i * self.n + j]
    }

    pub fn lower(&self) -> Matrix {
        Matrix::new(self.n, self.n, self.l.clone()).expect("factor has n*n finite entries")
    }

    /// Solves `L y = b`.
    pub fn solve_lower(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.l[i * n + k] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        y
    }

    /// Solves `Lᵀ x = y`.
    pub fn solve_upper(&self, y: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x = y.to_vec();
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in (i + 1)..n {
                s -= self.l[k * n + i] * x[k];
            }
            x[i] = s / self.l[i * n + i];
        }
        x
    }

    /// Solves `B x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        self.solve_upper(&self.solve_lower(b))
    }

    /// `L Lᵀ`.
    pub fn reconstruct(&self) -> SymMatrix {
        let n = self.n;
        SymMatrix::from_upper_fn(n, |i, j| {
            (0..=i.min(j)).map(|k| self.l(i, k) * self.l(j, k)).sum()
        })
    }

    /// Whitened matrix `L⁻¹ A L⁻ᵀ`, whose eigenvalues are the generalized
    /// eigenvalues of `(A, B)`.
    pub fn whiten(&self, a: &SymMatrix) -> SymMatrix {
        let n = self.n;
        // columns of L⁻¹ A
        let mut m = Matrix::zeros(n, n);
        for j in 0..n {
            let col: Vec<f64> = (0..n).map(|i| a.get(i, j)).collect();
            let y = self.solve_lower(&col);
            for i in 0..n {
                m.set(i, j, y[i]);
            }
        }
        // (L⁻¹ (L⁻¹ A)ᵀ)ᵀ = L⁻¹ A L⁻ᵀ
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            let y = self.solve_lower(m.row(i));
            for j in 0..n {
                out[i * n + j] = y[j];
            }
        }
        SymMatrix::with_tolerance(n, out, f64::INFINITY).expect("finite whitened matrix")
    }

    /// Maps a whitened-space vector `y` back: `x = L⁻ᵀ y`, so `xᵀBx = yᵀy`.
    pub fn unwhiten(&self, y: &[f64]) -> Vec<f64> {
        self.solve_upper(y)
    }
}
