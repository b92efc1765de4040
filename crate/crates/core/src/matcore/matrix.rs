use std::ops::Index;

use crate::error::{Error, Result};

/// Absolute asymmetry accepted (and averaged away) by [`SymMatrix::new`],
/// relative to `max(1, max|entry|)`.
pub const SYMMETRY_TOL: f64 = 1e-8;

/// Dense symmetric matrix stored in full row-major layout.
///
/// Both triangles are stored so that row slices can be used directly in
/// matrix-vector products. Every constructor guarantees exact symmetry and
/// finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Builds a matrix from row-major entries, averaging away asymmetry up to
    /// [`SYMMETRY_TOL`] and rejecting anything larger.
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(n, data, SYMMETRY_TOL)
    }

    /// Like [`SymMatrix::new`] with an explicit asymmetry tolerance.
    /// `tol = f64::INFINITY` symmetrizes unconditionally.
    pub fn with_tolerance(n: usize, mut data: Vec<f64>, tol: f64) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: data.len(),
            });
        }
        let mut scale = 1.0_f64;
        for (k, v) in data.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    row: k / n,
                    col: k % n,
                });
            }
            scale = scale.max(v.abs());
        }
        let mut max_dev = 0.0_f64;
        for i in 0..n {
            for j in (i + 1)..n {
                max_dev = max_dev.max((data[i * n + j] - data[j * n + i]).abs());
            }
        }
        if max_dev > tol * scale {
            return Err(Error::Asymmetric {
                max_deviation: max_dev,
            });
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = 0.5 * (data[i * n + j] + data[j * n + i]);
                data[i * n + j] = avg;
                data[j * n + i] = avg;
            }
        }
        Ok(Self { n, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Self::new(n, data)
    }

    /// Builds from the upper triangle: `f(i, j)` is called for `i <= j` only.
    pub fn from_upper_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        Self { n, data }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal_from(&vec![1.0; n])
    }

    pub fn diagonal_from(d: &[f64]) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n);
        for (i, &v) in d.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    /// Symmetric rank-one matrix `v vᵀ`.
    pub fn outer(v: &[f64]) -> Self {
        Self::from_upper_fn(v.len(), |i, j| v[i] * v[j])
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    /// `S v`, checking dimensions.
    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: v.len(),
            });
        }
        Ok(self.apply(v))
    }

    /// `S v` without the dimension check.
    pub(crate) fn apply(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.n);
        (0..self.n).map(|i| dot(self.row(i), v)).collect()
    }

    /// `vᵀ S v`.
    pub fn quad_form(&self, v: &[f64]) -> f64 {
        dot(v, &self.apply(v))
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest absolute row sum; a Gershgorin bound on the spectral radius.
    pub fn max_row_sum(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self.get(i, j) == 0.0))
    }

    /// Principal submatrix on `idx`.
    pub fn submatrix(&self, idx: &[usize]) -> SymMatrix {
        Self::from_upper_fn(idx.len(), |a, b| self.get(idx[a], idx[b]))
    }

    /// `S + shift·I`.
    pub fn shifted(&self, shift: f64) -> SymMatrix {
        let mut out = self.clone();
        for i in 0..self.n {
            out.data[i * self.n + i] += shift;
        }
        out
    }

    pub fn scaled(&self, factor: f64) -> SymMatrix {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    /// `S + alpha·T`.
    pub fn add_scaled(&self, other: &SymMatrix, alpha: f64) -> Result<SymMatrix> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + alpha * b)
            .collect();
        Ok(Self { n: self.n, data })
    }

    /// Symmetric rank-one update `S + alpha·v vᵀ`.
    pub fn rank_one_update(&self, v: &[f64], alpha: f64) -> SymMatrix {
        let n = self.n;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] += alpha * v[i] * v[j];
            }
        }
        out
    }

    /// Congruence `Pᵀ S P` for a square `P`, re-symmetrized.
    pub fn congruence(&self, p: &Matrix) -> SymMatrix {
        debug_assert_eq!(p.rows(), self.n);
        let sp = Matrix::from_fn(self.n, p.cols(), |i, j| {
            (0..self.n).map(|k| self.get(i, k) * p.get(k, j)).sum()
        });
        let m = p.cols();
        Self::from_upper_fn(m, |i, j| {
            let a: f64 = (0..self.n).map(|k| p.get(k, i) * sp.get(k, j)).sum();
            let b: f64 = (0..self.n).map(|k| p.get(k, j) * sp.get(k, i)).sum();
            0.5 * (a + b)
        })
    }
}

impl Index<(usize, usize)> for SymMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

/// Dense general matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if let Some(k) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: k / cols.max(1),
                col: k % cols.max(1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch {
                    expected: c,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(r, c, data)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Matrix whose columns are `cols`.
    pub fn from_columns(cols: &[Vec<f64>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        Self::from_fn(r, c, |i, j| cols[j][i])
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// `M v`.
    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    /// `Mᵀ v`.
    pub fn tr_matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: v.len(),
            });
        }
        let mut out = vec![0.0; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            axpy(vi, self.row(i), &mut out);
        }
        Ok(out)
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    /// `Mᵀ M` as a symmetric matrix.
    pub fn gram(&self) -> SymMatrix {
        let mut acc = vec![0.0; self.cols * self.cols];
        for i in 0..self.rows {
            let r = self.row(i);
            for a in 0..self.cols {
                if r[a] == 0.0 {
                    continue;
                }
                for b in a..self.cols {
                    acc[a * self.cols + b] += r[a] * r[b];
                }
            }
        }
        SymMatrix::from_upper_fn(self.cols, |a, b| acc[a * self.cols + b])
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

impl From<&SymMatrix> for Matrix {
    fn from(s: &SymMatrix) -> Self {
        Matrix {
            rows: s.n(),
            cols: s.n(),
            data: s.as_slice().to_vec(),
        }
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// `y += alpha·x`.
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scale(v: &[f64], alpha: f64) -> Vec<f64> {
    v.iter().map(|x| x * alpha).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Flips `v` so that its largest-magnitude entry is positive.
pub fn align_sign(v: &mut [f64]) {
    let mut best = 0.0_f64;
    let mut sign = 1.0;
    for &x in v.iter() {
        if x.abs() > best {
            best = x.abs();
            sign = x.signum();
        }
    }
    if sign < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_diagonal_matvec() {
        let i3 = SymMatrix::identity(3);
        assert_eq!(i3.matvec(&[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
        let d = SymMatrix::diagonal_from(&[2.0, 1.0]);
        assert_eq!(d.matvec(&[1.0, 1.0]).unwrap(), vec![2.0, 1.0]);
    }

    #[test]
    fn matvec_rejects_wrong_length() {
        let s = SymMatrix::identity(3);
        assert!(matches!(
            s.matvec(&[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn small_asymmetry_is_averaged_large_is_rejected() {
        let s = SymMatrix::new(2, vec![1.0, 0.5, 0.5 + 1e-10, 1.0]).unwrap();
        assert_eq!(s.get(0, 1), s.get(1, 0));
        let e = SymMatrix::new(2, vec![1.0, 0.5, 0.6, 1.0]).unwrap_err();
        assert!(matches!(e, Error::Asymmetric { .. }));
        let forced = SymMatrix::with_tolerance(2, vec![1.0, 0.5, 0.7, 1.0], f64::INFINITY).unwrap();
        assert!((forced.get(1, 0) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn non_finite_rejected() {
        assert!(matches!(
            SymMatrix::new(1, vec![f64::NAN]),
            Err(Error::NonFinite { row: 0, col: 0 })
        ));
    }

    #[test]
    fn gram_matches_transpose_product() {
        let c = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
        let g = c.gram();
        let ct = c.transpose();
        let full = ct.matmul(&c).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(g.get(i, j), full.get(i, j));
            }
        }
    }

    #[test]
    fn sign_alignment() {
        let mut v = vec![0.1, -0.9, 0.3];
        align_sign(&mut v);
        assert_eq!(v, vec![-0.1, 0.9, -0.3]);
    }
}
