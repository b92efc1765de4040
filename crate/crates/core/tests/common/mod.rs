// Random instance generators and reference computations shared by the
// integration tests. Nothing here calls into the solver paths under test.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sgev::{Matrix, SymMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect()
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    let data = (0..rows * cols)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    Matrix::new(rows, cols, data).unwrap()
}

/// `GᵀG/m + shift·I` with `G` an `m×n` Gaussian matrix.
pub fn random_spd(rng: &mut ChaCha8Rng, n: usize, shift: f64) -> SymMatrix {
    let m = n + 3;
    let g = gaussian_matrix(rng, m, n);
    SymMatrix::from_upper_fn(n, |i, j| {
        let s: f64 = (0..m).map(|k| g.get(k, i) * g.get(k, j)).sum();
        s / m as f64 + if i == j { shift } else { 0.0 }
    })
}

/// Rank-deficient PSD matrix `GᵀG` with `rank` rows.
pub fn random_psd(rng: &mut ChaCha8Rng, n: usize, rank: usize) -> SymMatrix {
    let g = gaussian_matrix(rng, rank, n);
    SymMatrix::from_upper_fn(n, |i, j| (0..rank).map(|k| g.get(k, i) * g.get(k, j)).sum())
}

/// Symmetric Gaussian matrix, generally indefinite.
pub fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> SymMatrix {
    let g = gaussian_matrix(rng, n, n);
    SymMatrix::from_upper_fn(n, |i, j| 0.5 * (g.get(i, j) + g.get(j, i)))
}

pub fn naive_matvec(a: &SymMatrix, x: &[f64]) -> Vec<f64> {
    (0..a.n())
        .map(|i| (0..a.n()).map(|j| a.get(i, j) * x[j]).sum())
        .collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn quad(a: &SymMatrix, x: &[f64]) -> f64 {
    dot(x, &naive_matvec(a, x))
}

/// Lower Cholesky factor as a dense row-major `Vec<Vec<f64>>`.
pub fn cholesky(b: &SymMatrix) -> Vec<Vec<f64>> {
    let n = b.n();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let d = b.get(i, i) - s;
                assert!(d > 0.0, "matrix is not positive definite");
                l[i][i] = d.sqrt();
            } else {
                l[i][j] = (b.get(i, j) - s) / l[j][j];
            }
        }
    }
    l
}

pub fn forward(l: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut y = vec![0.0; n];
    for i in 0..n {
        let s: f64 = (0..i).map(|k| l[i][k] * y[k]).sum();
        y[i] = (b[i] - s) / l[i][i];
    }
    y
}

pub fn backward(l: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let n = y.len();
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| l[k][i] * x[k]).sum();
        x[i] = (y[i] - s) / l[i][i];
    }
    x
}

pub fn spd_solve(b: &SymMatrix, rhs: &[f64]) -> Vec<f64> {
    let l = cholesky(b);
    backward(&l, &forward(&l, rhs))
}

/// `L⁻¹ A L⁻ᵀ` for `B = LLᵀ`.
pub fn whiten(a: &SymMatrix, b: &SymMatrix) -> SymMatrix {
    let n = a.n();
    let l = cholesky(b);
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let col: Vec<f64> = (0..n).map(|i| a.get(i, j)).collect();
            forward(&l, &col)
        })
        .collect();
    // cols[j] = L⁻¹ A e_j, so M = L⁻¹A and the result is (L⁻¹ Mᵀ)ᵀ
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let r: Vec<f64> = (0..n).map(|j| cols[j][i]).collect();
            forward(&l, &r)
        })
        .collect();
    SymMatrix::with_tolerance(
        n,
        (0..n * n)
            .map(|k| 0.5 * (rows[k / n][k % n] + rows[k % n][k / n]))
            .collect(),
        1e-6,
    )
    .unwrap()
}

/// Largest generalized eigenvalue of `(A, B)` through Cholesky whitening.
pub fn oracle_lambda_max(a: &SymMatrix, b: &SymMatrix) -> f64 {
    sgev::matcore::full_eigen(&whiten(a, b)).unwrap().values[0]
}

/// `|cos|` based angular distance between two directions.
pub fn angle(a: &[f64], b: &[f64]) -> f64 {
    let c = (dot(a, b) / (norm(a) * norm(b))).abs().min(1.0);
    c.acos()
}

/// All subsets of `0..n` with exactly `k` elements.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Best variance over all supports of size `k`.
pub fn enumerate_best(a: &SymMatrix, k: usize) -> f64 {
    subsets(a.n(), k)
        .iter()
        .map(|s| sgev::matcore::full_eigen(&a.submatrix(s)).unwrap().values[0])
        .fold(f64::NEG_INFINITY, f64::max)
}
