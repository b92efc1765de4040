//! Sparse canonical correlation analysis and retrieval scoring.
//!
//! CCA is posed as the generalized eigenproblem with
//! `A = [[0, Σxy], [Σyx, 0]]` and `B = blockdiag(Σxx, Σyy)`. The block `A` is
//! indefinite with a spectrum symmetric about zero, so the solver runs with
//! `τ = −λmin(A) = λmax(A)`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matcore::{dot, lambda_max, Matrix, SpdFactor, SymMatrix};
use crate::sgev::{
    cardinality, solve, support, variational_renormalization, SgevConfig, SgevProblem, SgevSolution,
};

/// Default ridge factor γ in `Σ + γ·tr(Σ)/p·I`.
pub const DEFAULT_RIDGE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct CcaInput {
    pub sxx: SymMatrix,
    pub syy: SymMatrix,
    /// `p × q` cross-covariance.
    pub sxy: Matrix,
}

fn ridge(s: &SymMatrix, gamma: f64) -> Result<SymMatrix> {
    if SpdFactor::new(s).is_ok() {
        return Ok(s.clone());
    }
    let n = s.n().max(1) as f64;
    let bump = gamma * s.trace().abs().max(f64::MIN_POSITIVE) / n;
    log::info!("covariance block is not positive definite; adding ridge {bump:e}");
    let r = s.shifted(bump);
    SpdFactor::new(&r)?;
    Ok(r)
}

impl CcaInput {
    pub fn new(sxx: SymMatrix, syy: SymMatrix, sxy: Matrix) -> Result<Self> {
        if sxy.rows() != sxx.n() {
            return Err(Error::DimensionMismatch {
                expected: sxx.n(),
                found: sxy.rows(),
            });
        }
        if sxy.cols() != syy.n() {
            return Err(Error::DimensionMismatch {
                expected: syy.n(),
                found: sxy.cols(),
            });
        }
        Ok(Self { sxx, syy, sxy })
    }

    /// Covariances `XᵀX`, `YᵀY`, `XᵀY` of paired observations (rows).
    pub fn from_views(x: &Matrix, y: &Matrix, center: bool) -> Result<Self> {
        if x.rows() != y.rows() {
            return Err(Error::DimensionMismatch {
                expected: x.rows(),
                found: y.rows(),
            });
        }
        let (x, y) = if center {
            (center_columns(x), center_columns(y))
        } else {
            (x.clone(), y.clone())
        };
        let sxy = x.transpose().matmul(&y)?;
        Self::new(x.gram(), y.gram(), sxy)
    }

    pub fn p(&self) -> usize {
        self.sxx.n()
    }

    pub fn q(&self) -> usize {
        self.syy.n()
    }

    /// Adds `γ·tr(Σ)/p·I` to each diagonal block whose Cholesky fails.
    pub fn regularized(&self, gamma: f64) -> Result<Self> {
        Ok(Self {
            sxx: ridge(&self.sxx, gamma)?,
            syy: ridge(&self.syy, gamma)?,
            sxy: self.sxy.clone(),
        })
    }
}

pub fn column_means(m: &Matrix) -> Vec<f64> {
    let r = m.rows().max(1) as f64;
    (0..m.cols())
        .map(|j| m.column(j).iter().sum::<f64>() / r)
        .collect()
}

/// Rows of `m` with `means` subtracted.
pub fn centered_rows(m: &Matrix, means: &[f64]) -> Vec<Vec<f64>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().zip(means).map(|(v, c)| v - c).collect())
        .collect()
}

pub(crate) fn center_columns(m: &Matrix) -> Matrix {
    let means = column_means(m);
    Matrix::from_fn(m.rows(), m.cols(), |i, j| m.get(i, j) - means[j])
}

fn block_a(sxy: &Matrix) -> SymMatrix {
    let p = sxy.rows();
    SymMatrix::from_upper_fn(p + sxy.cols(), |i, j| {
        if i < p && j >= p {
            sxy.get(i, j - p)
        } else {
            0.0
        }
    })
}

/// Largest singular value of `m`, from the smaller of its two gram matrices.
fn spectral_norm(m: &Matrix) -> Result<f64> {
    let g = if m.rows() <= m.cols() {
        m.transpose().gram()
    } else {
        m.gram()
    };
    Ok(lambda_max(&g)?.max(0.0).sqrt())
}

/// Block form `(A, B)` of the CCA problem, `x = (wx; wy)`.
pub fn assemble_block(input: &CcaInput) -> Result<SgevProblem> {
    let (p, q) = (input.p(), input.q());
    let a = block_a(&input.sxy);
    let b = SymMatrix::from_upper_fn(p + q, |i, j| {
        if j < p {
            input.sxx.get(i, j)
        } else if i >= p {
            input.syy.get(i - p, j - p)
        } else {
            0.0
        }
    });
    Ok(SgevProblem::new(a, b)?.with_lambda_min_a(-spectral_norm(&input.sxy)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CcaPair {
    /// Unit `Σxx`-norm (zero if the side was thresholded away).
    pub wx: Vec<f64>,
    pub wy: Vec<f64>,
    /// `wxᵀΣxy wy`, non-negative.
    pub correlation: f64,
    pub solution: SgevSolution,
}

fn unit_side(w: &mut [f64], s: &SymMatrix) {
    let q = s.quad_form(w);
    if q > 0.0 {
        let f = 1.0 / q.sqrt();
        w.iter_mut().for_each(|v| *v *= f);
    }
}

fn bilinear(m: &Matrix, x: &[f64], y: &[f64]) -> f64 {
    (0..m.rows())
        .filter(|&i| x[i] != 0.0)
        .map(|i| x[i] * dot(m.row(i), y))
        .sum()
}

/// One sparse canonical pair: solve the block problem, renormalize on the
/// block support, then rescale each side to unit `Σ`-norm.
pub fn dccca_solve(input: &CcaInput, config: &SgevConfig) -> Result<CcaPair> {
    solve_pair(&assemble_block(input)?, input, config)
}

fn solve_pair(problem: &SgevProblem, input: &CcaInput, config: &SgevConfig) -> Result<CcaPair> {
    let p = input.p();
    let (solution, _) = solve(problem, config)?;
    let x = if solution.cardinality == 0 {
        solution.x.clone()
    } else {
        variational_renormalization(&solution.x, problem.a(), problem.b(), config.zero_tol)?.x
    };
    let mut wx = x[..p].to_vec();
    let mut wy = x[p..].to_vec();
    unit_side(&mut wx, &input.sxx);
    unit_side(&mut wy, &input.syy);
    let mut correlation = bilinear(&input.sxy, &wx, &wy);
    if correlation < 0.0 {
        wy.iter_mut().for_each(|v| *v = -*v);
        correlation = -correlation;
    }
    Ok(CcaPair {
        wx,
        wy,
        correlation,
        solution,
    })
}

/// Stack of canonical pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct CcaModel {
    pub vx: Vec<Vec<f64>>,
    pub vy: Vec<Vec<f64>>,
    pub correlations: Vec<f64>,
    pub cardinalities: Vec<(usize, usize)>,
    support_x: Vec<Vec<usize>>,
    support_y: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    X,
    Y,
}

impl CcaModel {
    pub fn new(vx: Vec<Vec<f64>>, vy: Vec<Vec<f64>>, correlations: Vec<f64>) -> Result<Self> {
        if vx.len() != vy.len() || vx.len() != correlations.len() {
            return Err(Error::InvalidInput(
                "component lists have different lengths".into(),
            ));
        }
        let support_x: Vec<Vec<usize>> = vx.iter().map(|v| support(v, 0.0)).collect();
        let support_y: Vec<Vec<usize>> = vy.iter().map(|v| support(v, 0.0)).collect();
        let cardinalities = support_x
            .iter()
            .zip(&support_y)
            .map(|(a, b)| (a.len(), b.len()))
            .collect();
        Ok(Self {
            vx,
            vy,
            correlations,
            cardinalities,
            support_x,
            support_y,
        })
    }

    pub fn d(&self) -> usize {
        self.vx.len()
    }

    /// Fraction of exactly-zero loadings pooled over every component and side.
    pub fn zero_fraction(&self) -> f64 {
        let total: usize = self.vx.iter().chain(&self.vy).map(|v| v.len()).sum();
        let nz: usize = self.cardinalities.iter().map(|(a, b)| a + b).sum();
        if total == 0 {
            0.0
        } else {
            1.0 - nz as f64 / total as f64
        }
    }

    fn side(&self, side: Side) -> (&[Vec<f64>], &[Vec<usize>]) {
        match side {
            Side::X => (&self.vx, &self.support_x),
            Side::Y => (&self.vy, &self.support_y),
        }
    }
}

/// Extracts `d` pairs, deflating `Σxy ← (I − Px)Σxy(I − Py)` between pairs
/// with `Px = ΣxxWxWxᵀ`, `Py = WyWyᵀΣyy` for `Σ`-orthonormalized `Wx`, `Wy`.
pub fn cca_components(input: &CcaInput, d: usize, config: &SgevConfig) -> Result<CcaModel> {
    if d == 0 {
        return Err(Error::InvalidConfig(
            "need at least one canonical pair".into(),
        ));
    }
    let base_norm = input.sxy.frobenius().max(1.0);
    let mut vx = Vec::with_capacity(d);
    let mut vy = Vec::with_capacity(d);
    let mut corr = Vec::with_capacity(d);
    let mut bx: Vec<Vec<f64>> = Vec::new();
    let mut by: Vec<Vec<f64>> = Vec::new();
    let mut current = input.clone();
    let base = assemble_block(input)?;
    for k in 0..d {
        let problem = if k == 0 {
            None
        } else {
            current.sxy = deflate_cross(&input.sxy, &input.sxx, &bx, &input.syy, &by);
            if current.sxy.frobenius() < 1e-12 * base_norm {
                return Err(Error::EarlyStop { found: k });
            }
            Some(
                base.with_a(block_a(&current.sxy))?
                    .with_lambda_min_a(-spectral_norm(&current.sxy)?),
            )
        };
        let pair = solve_pair(problem.as_ref().unwrap_or(&base), &current, config)?;
        if let Some(u) = sigma_orthonormal(&bx, &pair.wx, &input.sxx) {
            bx.push(u);
        }
        if let Some(u) = sigma_orthonormal(&by, &pair.wy, &input.syy) {
            by.push(u);
        }
        corr.push(bilinear(&input.sxy, &pair.wx, &pair.wy).abs());
        vx.push(pair.wx);
        vy.push(pair.wy);
    }
    CcaModel::new(vx, vy, corr)
}

fn sigma_orthonormal(basis: &[Vec<f64>], w: &[f64], s: &SymMatrix) -> Option<Vec<f64>> {
    let mut r = w.to_vec();
    for u in basis {
        let c = dot(u, &s.apply(&r));
        r.iter_mut().zip(u).for_each(|(a, b)| *a -= c * b);
    }
    let q = s.quad_form(&r);
    if !(q > 1e-20) {
        return None;
    }
    let f = 1.0 / q.sqrt();
    Some(r.iter().map(|v| v * f).collect())
}

fn deflate_cross(
    sxy: &Matrix,
    sxx: &SymMatrix,
    wx: &[Vec<f64>],
    syy: &SymMatrix,
    wy: &[Vec<f64>],
) -> Matrix {
    let (p, q) = (sxy.rows(), sxy.cols());
    // left factor (I − Σxx Wx Wxᵀ)
    let sw: Vec<Vec<f64>> = wx.iter().map(|w| sxx.apply(w)).collect();
    let left = Matrix::from_fn(p, p, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        id - sw.iter().zip(wx).map(|(s, w)| s[i] * w[j]).sum::<f64>()
    });
    // right factor (I − Wy Wyᵀ Σyy)
    let sw: Vec<Vec<f64>> = wy.iter().map(|w| syy.apply(w)).collect();
    let right = Matrix::from_fn(q, q, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        id - wy.iter().zip(&sw).map(|(w, s)| w[i] * s[j]).sum::<f64>()
    });
    left.matmul(sxy)
        .and_then(|m| m.matmul(&right))
        .expect("conforming shapes")
}

/// `Vᵀq` touching only the support of each component.
pub fn project(model: &CcaModel, side: Side, q: &[f64]) -> Result<Vec<f64>> {
    let (v, s) = model.side(side);
    let dim = v.first().map_or(q.len(), |c| c.len());
    if q.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: q.len(),
        });
    }
    Ok(v.iter()
        .zip(s)
        .map(|(c, idx)| idx.iter().map(|&i| c[i] * q[i]).sum())
        .collect())
}

/// Dense `Vᵀq`, the reference for [`project`].
pub fn project_dense(model: &CcaModel, side: Side, q: &[f64]) -> Result<Vec<f64>> {
    let (v, _) = model.side(side);
    let dim = v.first().map_or(q.len(), |c| c.len());
    if q.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: q.len(),
        });
    }
    Ok(v.iter().map(|c| dot(c, q)).collect())
}

/// For each query, target indices sorted by Euclidean distance, ties by index.
pub fn retrieve(queries: &[Vec<f64>], targets: &[Vec<f64>]) -> Result<Vec<Vec<usize>>> {
    if targets.is_empty() {
        return Err(Error::InvalidInput("no retrieval targets".into()));
    }
    let d = targets[0].len();
    for v in queries.iter().chain(targets) {
        if v.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: v.len(),
            });
        }
    }
    Ok(queries
        .par_iter()
        .map(|q| {
            let dist: Vec<f64> = targets
                .iter()
                .map(|t| t.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
                .collect();
            let mut order: Vec<usize> = (0..targets.len()).collect();
            order.sort_by(|&i, &j| dist[i].total_cmp(&dist[j]).then(i.cmp(&j)));
            order
        })
        .collect())
}

/// `1 − (rank − 1)/(n_targets − 1)` for a 1-based rank.
pub fn aroc(rank: usize, n_targets: usize) -> Result<f64> {
    if n_targets < 2 || rank == 0 || rank > n_targets {
        return Err(Error::InvalidInput(format!(
            "rank {rank} outside 1..={n_targets} (need at least 2 targets)"
        )));
    }
    Ok(1.0 - (rank - 1) as f64 / (n_targets - 1) as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RetrievalReport {
    /// 1-based rank of the relevant target per query.
    pub ranks: Vec<usize>,
    pub aroc: Vec<f64>,
    pub average_aroc: f64,
}

/// Scores paired retrieval where query `i` is relevant to target `i`.
pub fn evaluate_retrieval(queries: &[Vec<f64>], targets: &[Vec<f64>]) -> Result<RetrievalReport> {
    if queries.len() > targets.len() {
        return Err(Error::InvalidInput(
            "more queries than targets in paired retrieval".into(),
        ));
    }
    let rankings = retrieve(queries, targets)?;
    let ranks: Vec<usize> = rankings
        .iter()
        .enumerate()
        .map(|(i, r)| r.iter().position(|&t| t == i).expect("target present") + 1)
        .collect();
    let aroc = ranks
        .iter()
        .map(|&r| aroc(r, targets.len()))
        .collect::<Result<Vec<_>>>()?;
    let average_aroc = if aroc.is_empty() {
        0.0
    } else {
        aroc.iter().sum::<f64>() / aroc.len() as f64
    };
    Ok(RetrievalReport {
        ranks,
        aroc,
        average_aroc,
    })
}

/// Projects paired documents through `model` and scores retrieval from the
/// `x` side into the `y` side. Documents are expected centered with the
/// training means (see [`centered_rows`]).
pub fn cross_view_retrieval(
    model: &CcaModel,
    x_docs: &[Vec<f64>],
    y_docs: &[Vec<f64>],
) -> Result<RetrievalReport> {
    let qx = x_docs
        .iter()
        .map(|q| project(model, Side::X, q))
        .collect::<Result<Vec<_>>>()?;
    let qy = y_docs
        .iter()
        .map(|q| project(model, Side::Y, q))
        .collect::<Result<Vec<_>>>()?;
    evaluate_retrieval(&qx, &qy)
}

/// Per-side cardinality of a block solution.
pub fn split_cardinality(x: &[f64], p: usize, zero_tol: f64) -> (usize, usize) {
    (
        cardinality(&x[..p], zero_tol),
        cardinality(&x[p..], zero_tol),
    )
}
