//! Euclidean projection onto `{x : xᵀBx ≤ 1}`.
//!
//! Outside the ellipsoid the projection is `x(μ) = (I + μB)⁻¹ s` where `μ > 0`
//! solves the secular equation `g(μ) = x(μ)ᵀ B x(μ) − 1 = 0`. In the eigenbasis
//! `B = V diag(d) Vᵀ` this reads `g(μ) = Σ d_i ŝ_i² / (1 + μ d_i)² − 1`, so
//! after one `O(n³)` decomposition each evaluation of `g` costs `O(n)`.

use super::eigen::full_eigen;
use super::matrix::SymMatrix;
use crate::error::{Error, Result};

const MAX_ROOT_ITERS: usize = 200;
/// Target accuracy of `|xᵀBx − 1|` on the boundary.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Reusable projector holding the eigendecomposition of `B`.
#[derive(Debug, Clone)]
pub struct EllipsoidProjector {
    n: usize,
    d: Vec<f64>,
    // row-major V with eigenvectors as columns
    v: Vec<f64>,
    b: SymMatrix,
}

impl EllipsoidProjector {
    pub fn new(b: &SymMatrix) -> Result<Self> {
        let n = b.n();
        let eig = full_eigen(b)?;
        if let Some((k, &dk)) = eig.values.iter().enumerate().find(|(_, &d)| !(d > 0.0)) {
            return Err(Error::NotPositiveDefinite {
                index: k,
                pivot: dk,
            });
        }
        let mut v = vec![0.0; n * n];
        for (k, vec) in eig.vectors.iter().enumerate() {
            for i in 0..n {
                v[i * n + k] = vec[i];
            }
        }
        Ok(Self {
            n,
            d: eig.values,
            v,
            b: b.clone(),
        })
    }

    pub fn b(&self) -> &SymMatrix {
        &self.b
    }

    fn to_eigenbasis(&self, s: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n];
        for i in 0..n {
            let si = s[i];
            if si == 0.0 {
                continue;
            }
            let row = &self.v[i * n..(i + 1) * n];
            for k in 0..n {
                out[k] += row[k] * si;
            }
        }
        out
    }

    fn out_of_eigenbasis(&self, y: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|i| {
                self.v[i * n..(i + 1) * n]
                    .iter()
                    .zip(y)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// `xᵀBx`.
    pub fn b_norm_sq(&self, x: &[f64]) -> f64 {
        self.b.quad_form(x)
    }

    /// Projects `s`, returning `s` itself when `sᵀBs ≤ 1`.
    pub fn project(&self, s: &[f64]) -> Result<Vec<f64>> {
        if s.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: s.len(),
            });
        }
        if self.b.quad_form(s) <= 1.0 {
            return Ok(s.to_vec());
        }
        let sh = self.to_eigenbasis(s);
        let w: Vec<f64> = self.d.iter().zip(&sh).map(|(d, s)| d * s * s).collect();
        let g = |mu: f64| -> f64 {
            self.d
                .iter()
                .zip(&w)
                .map(|(d, w)| w / ((1.0 + mu * d) * (1.0 + mu * d)))
                .sum::<f64>()
                - 1.0
        };
        let dg = |mu: f64| -> f64 {
            -2.0 * self
                .d
                .iter()
                .zip(&w)
                .map(|(d, w)| d * w / (1.0 + mu * d).powi(3))
                .sum::<f64>()
        };

        // g is convex and strictly decreasing on μ ≥ 0 with g(0) > 0, so Newton
        // from the left approaches the root monotonically; the bracket only
        // guards against rounding.
        let mut lo = 0.0_f64;
        let mut hi = 1.0_f64;
        while g(hi) > 0.0 {
            lo = hi;
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::NoConvergence {
                    what: "ellipsoid bracket",
                    iterations: 0,
                });
            }
        }
        let mut mu = lo;
        let mut done = false;
        for _ in 0..MAX_ROOT_ITERS {
            let gm = g(mu);
            if gm.abs() <= BOUNDARY_TOL {
                done = true;
                break;
            }
            if gm > 0.0 {
                lo = mu;
            } else {
                hi = mu;
            }
            let step = gm / dg(mu);
            let next = mu - step;
            mu = if next > lo && next < hi {
                next
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo <= f64::EPSILON * hi.max(1.0) {
                done = true;
                break;
            }
        }
        if !done {
            return Err(Error::NoConvergence {
                what: "ellipsoid secular equation",
                iterations: MAX_ROOT_ITERS,
            });
        }
        let y: Vec<f64> = sh
            .iter()
            .zip(&self.d)
            .map(|(s, d)| s / (1.0 + mu * d))
            .collect();
        let mut x = self.out_of_eigenbasis(&y);
        let q = self.b.quad_form(&x);
        if q > 1.0 {
            let f = 1.0 / q.sqrt();
            x.iter_mut().for_each(|v| *v *= f);
        }
        Ok(x)
    }
}

/// One-shot projection; builds an [`EllipsoidProjector`] internally.
pub fn project_ellipsoid(s: &[f64], b: &SymMatrix) -> Result<Vec<f64>> {
    EllipsoidProjector::new(b)?.project(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interior_point_unchanged() {
        let x = project_ellipsoid(&[0.5, 0.0], &SymMatrix::identity(2)).unwrap();
        assert_eq!(x, vec![0.5, 0.0]);
    }

    #[test]
    fn radial_projection_on_unit_disk() {
        let x = project_ellipsoid(&[2.0, 0.0], &SymMatrix::identity(2)).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && x[1].abs() < 1e-15);
    }

    #[test]
    fn boundary_accuracy_and_idempotence() {
        let b = SymMatrix::from_rows(&[vec![2.0, 0.3], vec![0.3, 0.5]]).unwrap();
        let p = EllipsoidProjector::new(&b).unwrap();
        let x = p.project(&[3.0, -4.0]).unwrap();
        assert!((b.quad_form(&x) - 1.0).abs() <= 1e-10);
        let x2 = p.project(&x).unwrap();
        for (a, c) in x.iter().zip(&x2) {
            assert!((a - c).abs() <= 1e-10);
        }
    }

    #[test]
    fn rejects_indefinite() {
        let b = SymMatrix::diagonal_from(&[1.0, -1.0]);
        assert!(EllipsoidProjector::new(&b).is_err());
    }
}
