use super::matrix::{dot, norm2, SymMatrix};
use crate::error::{Error, Result};

/// Default sweep cap for the cyclic Jacobi solver.
pub const MAX_SWEEPS: usize = 100;

/// Above this dimension [`lambda_min`] switches from Jacobi to a shifted power
/// iteration.
pub const JACOBI_CUTOFF: usize = 2000;

/// Eigenvalues sorted descending with matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    /// `vectors[k]` is the eigenvector for `values[k]`.
    pub vectors: Vec<Vec<f64>>,
}

impl EigenPairs {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> (f64, &[f64]) {
        (self.values[0], &self.vectors[0])
    }

    pub fn min(&self) -> (f64, &[f64]) {
        let k = self.values.len() - 1;
        (self.values[k], &self.vectors[k])
    }
}

/// Full symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Rotation formulas follow the classical threshold Jacobi method: the first
/// three sweeps skip rotations whose off-diagonal entry is below
/// `0.2·Σ|a_pq|/n²`, later sweeps zero out entries that are negligible
/// relative to both diagonal neighbours. Iteration stops when the
/// off-diagonal part is exactly zero.
pub fn full_eigen(s: &SymMatrix) -> Result<EigenPairs> {
    full_eigen_with(s, MAX_SWEEPS)
}

pub fn full_eigen_with(s: &SymMatrix, max_sweeps: usize) -> Result<EigenPairs> {
    let n = s.n();
    let mut a = s.as_slice().to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let mut d: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    let mut b = d.clone();
    let mut z = vec![0.0; n];

    let mut converged = n <= 1;
    for sweep in 0..max_sweeps {
        if converged {
            break;
        }
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q].abs();
            }
        }
        if off == 0.0 {
            converged = true;
            break;
        }
        let thresh = if sweep < 3 {
            0.2 * off / (n * n) as f64
        } else {
            0.0
        };
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let g = 100.0 * apq.abs();
                if sweep > 3 && d[p].abs() + g == d[p].abs() && d[q].abs() + g == d[q].abs() {
                    a[p * n + q] = 0.0;
                    continue;
                }
                if apq.abs() <= thresh {
                    continue;
                }
                let h = d[q] - d[p];
                let t = if h.abs() + g == h.abs() {
                    apq / h
                } else {
                    let theta = 0.5 * h / apq;
                    let t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * c;
                let tau = sn / (1.0 + c);
                let h = t * apq;
                z[p] -= h;
                z[q] += h;
                d[p] -= h;
                d[q] += h;
                a[p * n + q] = 0.0;
                // rotate the upper triangle only
                for j in 0..p {
                    rotate(&mut a, j * n + p, j * n + q, sn, tau);
                }
                for j in (p + 1)..q {
                    rotate(&mut a, p * n + j, j * n + q, sn, tau);
                }
                for j in (q + 1)..n {
                    rotate(&mut a, p * n + j, q * n + j, sn, tau);
                }
                for j in 0..n {
                    rotate(&mut v, j * n + p, j * n + q, sn, tau);
                }
            }
        }
        for p in 0..n {
            b[p] += z[p];
            d[p] = b[p];
            z[p] = 0.0;
        }
    }
    if !converged {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q].abs();
            }
        }
        if off != 0.0 {
            return Err(Error::NoConvergence {
                what: "jacobi eigensolver",
                iterations: max_sweeps,
            });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[j].total_cmp(&d[i]));
    let values = order.iter().map(|&k| d[k]).collect();
    let vectors = order
        .iter()
        .map(|&k| (0..n).map(|i| v[i * n + k]).collect())
        .collect();
    Ok(EigenPairs { values, vectors })
}

#[inline]
fn rotate(a: &mut [f64], ij: usize, kl: usize, s: f64, tau: f64) {
    let g = a[ij];
    let h = a[kl];
    a[ij] = g - s * (h + g * tau);
    a[kl] = h + s * (g - h * tau);
}

/// Smallest eigenvalue of `s`.
pub fn lambda_min(s: &SymMatrix) -> Result<f64> {
    if s.n() <= JACOBI_CUTOFF {
        Ok(full_eigen(s)?.min().0)
    } else {
        shifted_power_lambda_min(s, 1e-9, 100_000)
    }
}

/// Largest eigenvalue of `s`.
pub fn lambda_max(s: &SymMatrix) -> Result<f64> {
    if s.n() <= JACOBI_CUTOFF {
        Ok(full_eigen(s)?.max().0)
    } else {
        Ok(-shifted_power_lambda_min(&s.scaled(-1.0), 1e-9, 100_000)?)
    }
}

/// `λmin(S) = c − λmax(cI − S)` with `c` the Gershgorin bound, so `cI − S ⪰ 0`
/// and plain power iteration applies.
pub fn shifted_power_lambda_min(s: &SymMatrix, rel_tol: f64, max_iter: usize) -> Result<f64> {
    let n = s.n();
    if n == 0 {
        return Err(Error::InvalidInput("empty matrix".into()));
    }
    let c = s.max_row_sum();
    let shifted = s.scaled(-1.0).shifted(c);
    // deterministic, generically non-orthogonal start
    let mut x: Vec<f64> = (0..n)
        .map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64)
        .collect();
    let nx = norm2(&x);
    x.iter_mut().for_each(|v| *v /= nx);
    let mut mu = 0.0;
    for _ in 0..max_iter {
        let y = shifted.apply(&x);
        let mu_new = dot(&x, &y);
        let ny = norm2(&y);
        if ny == 0.0 {
            return Ok(c);
        }
        let resid = y
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - mu_new * b).powi(2))
            .sum::<f64>()
            .sqrt();
        x = y.into_iter().map(|v| v / ny).collect();
        if resid <= rel_tol * mu_new.abs().max(1.0)
            && (mu_new - mu).abs() <= rel_tol * mu_new.abs().max(1.0)
        {
            return Ok(c - mu_new);
        }
        mu = mu_new;
    }
    Err(Error::NoConvergence {
        what: "shifted power iteration",
        iterations: max_iter,
    })
}
