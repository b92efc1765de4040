//! Regularization paths and cardinality targeting.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::SymMatrix;
use crate::sgev::{variational_renormalization, SgevConfig, SgevSolution};

use super::dcpca::{check_psd, dcpca_run};

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
                .collect()
        }
    }
}

/// Smallest `ρ̃` guaranteed to threshold every coordinate of DC-PCA on `A`.
pub fn rho_ceiling(a: &SymMatrix, epsilon: f64) -> f64 {
    2.0 * (1.0 / epsilon).ln_1p() * a.max_row_sum().max(f64::MIN_POSITIVE)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TradeoffPoint {
    pub rho_tilde: f64,
    pub cardinality: usize,
    /// Renormalized variance divided by `tr(A)`.
    pub pev: f64,
    /// Renormalized variance `xᵀAx`.
    pub variance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffCurve {
    pub instance: String,
    pub points: Vec<TradeoffPoint>,
}

impl TradeoffCurve {
    /// `rho,cardinality,pev` lines with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rho,cardinality,pev\n");
        for p in &self.points {
            out.push_str(&format!("{},{},{}\n", p.rho_tilde, p.cardinality, p.pev));
        }
        out
    }

    /// Best variance seen for each cardinality, indexed by cardinality.
    pub fn best_by_cardinality(&self, n: usize) -> Vec<Option<f64>> {
        let mut best = vec![None; n + 1];
        for p in &self.points {
            if p.cardinality <= n {
                let slot: &mut Option<f64> = &mut best[p.cardinality];
                *slot = Some(slot.map_or(p.variance, |v: f64| v.max(p.variance)));
            }
        }
        best
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub solver: SgevConfig,
    /// Start each grid point from the previous solution.
    pub warm_start: bool,
    /// Solve grid points on worker threads; disables warm starts.
    pub parallel: bool,
    pub instance: String,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            solver: SgevConfig::default(),
            warm_start: true,
            parallel: false,
            instance: String::new(),
        }
    }
}

#[derive(Debug, Clone)]
struct GridOutcome {
    solution: SgevSolution,
    renormalized: Option<(Vec<f64>, f64)>,
}

fn solve_point(
    a: &SymMatrix,
    solver: &SgevConfig,
    rho: f64,
    init: Option<Vec<f64>>,
) -> Result<GridOutcome> {
    let cfg = SgevConfig {
        rho_tilde: rho,
        init,
        ..solver.clone()
    };
    let (solution, _) = dcpca_run(a, &cfg)?;
    let renormalized = if solution.cardinality == 0 {
        None
    } else {
        let r = variational_renormalization(
            &solution.x,
            a,
            &SymMatrix::identity(a.n()),
            solver.zero_tol,
        )?;
        Some((r.x, r.objective))
    };
    Ok(GridOutcome {
        solution,
        renormalized,
    })
}

fn to_point(rho: f64, o: &GridOutcome, total: f64) -> TradeoffPoint {
    let variance = o.renormalized.as_ref().map_or(0.0, |r| r.1);
    TradeoffPoint {
        rho_tilde: rho,
        cardinality: o.solution.cardinality,
        pev: variance / total,
        variance,
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig("rho grid is empty".into()));
    }
    if grid.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
        return Err(Error::InvalidConfig(
            "rho grid entries must be finite and >= 0".into(),
        ));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfig(
            "rho grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// One DC-PCA solve plus renormalization per grid point.
pub fn sweep(a: &SymMatrix, rho_grid: &[f64], config: &SweepConfig) -> Result<TradeoffCurve> {
    check_grid(rho_grid)?;
    config.solver.validate()?;
    check_psd(a)?;
    let total = a.trace();
    let wrap = |index: usize| {
        move |e: Error| Error::Sweep {
            index,
            source: Box::new(e),
        }
    };
    let points = if config.parallel {
        rho_grid
            .par_iter()
            .enumerate()
            .map(|(i, &r)| {
                solve_point(a, &config.solver, r, config.solver.init.clone())
                    .map(|o| to_point(r, &o, total))
                    .map_err(wrap(i))
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        let mut points = Vec::with_capacity(rho_grid.len());
        let mut prev: Option<Vec<f64>> = None;
        for (i, &r) in rho_grid.iter().enumerate() {
            let init = if config.warm_start {
                prev.clone().or_else(|| config.solver.init.clone())
            } else {
                config.solver.init.clone()
            };
            let o = solve_point(a, &config.solver, r, init).map_err(wrap(i))?;
            prev = (o.solution.cardinality > 0).then(|| o.solution.x.clone());
            points.push(to_point(r, &o, total));
        }
        points
    };
    Ok(TradeoffCurve {
        instance: config.instance.clone(),
        points,
    })
}

#[derive(Debug, Clone)]
pub struct TuneSettings {
    pub grid_points: usize,
    /// Lower end of the scan as a fraction of [`rho_ceiling`].
    pub lo_fraction: f64,
    pub bisection_steps: usize,
}

impl Default for TuneSettings {
    fn default() -> Self {
        Self {
            grid_points: 120,
            lo_fraction: 1e-6,
            bisection_steps: 40,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TunedComponent {
    pub rho_tilde: f64,
    pub solution: SgevSolution,
    /// Renormalized loading, unit ℓ2 norm.
    pub loading: Vec<f64>,
    pub variance: f64,
}

/// Finds a `ρ̃` whose DC-PCA solution has exactly `target` nonzeros.
///
/// Scans a log grid below [`rho_ceiling`] with a fixed start (`solver.init`)
/// and keeps the hit with the largest renormalized variance; if no grid point
/// hits, bisects (in log scale) between the bracketing neighbours.
pub fn tune_for_cardinality(
    a: &SymMatrix,
    target: usize,
    solver: &SgevConfig,
    settings: &TuneSettings,
) -> Result<TunedComponent> {
    let n = a.n();
    if target == 0 || target > n {
        return Err(Error::InvalidConfig(format!(
            "target cardinality {target} outside 1..={n}"
        )));
    }
    solver.validate()?;
    let hi = rho_ceiling(a, solver.epsilon);
    let mut grid = vec![0.0];
    grid.extend(log_grid(
        hi * settings.lo_fraction,
        hi,
        settings.grid_points,
    ));
    let outcomes: Vec<GridOutcome> = grid
        .par_iter()
        .map(|&r| solve_point(a, solver, r, solver.init.clone()))
        .collect::<Result<_>>()?;

    let mut best: Option<(f64, &GridOutcome)> = None;
    for (r, o) in grid.iter().zip(&outcomes) {
        if o.solution.cardinality == target {
            let v = o.renormalized.as_ref().map_or(f64::NEG_INFINITY, |x| x.1);
            if best
                .is_none_or(|(_, b)| v > b.renormalized.as_ref().map_or(f64::NEG_INFINITY, |x| x.1))
            {
                best = Some((*r, o));
            }
        }
    }
    if let Some((r, o)) = best {
        return Ok(finish(r, o.clone()));
    }

    for i in 0..grid.len() - 1 {
        let (c0, c1) = (
            outcomes[i].solution.cardinality,
            outcomes[i + 1].solution.cardinality,
        );
        if !(c0 > target && c1 < target) {
            continue;
        }
        let (mut lo, mut hi) = (grid[i].max(hi * settings.lo_fraction * 1e-3), grid[i + 1]);
        for _ in 0..settings.bisection_steps {
            let mid = (lo * hi).sqrt();
            let o = solve_point(a, solver, mid, solver.init.clone())?;
            let c = o.solution.cardinality;
            if c == target {
                return Ok(finish(mid, o));
            }
            if c > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    Err(Error::UnreachableCardinality { target })
}

fn finish(rho: f64, o: GridOutcome) -> TunedComponent {
    let (loading, variance) = o.renormalized.expect("target cardinality is positive");
    TunedComponent {
        rho_tilde: rho,
        solution: o.solution,
        loading,
        variance,
    }
}
