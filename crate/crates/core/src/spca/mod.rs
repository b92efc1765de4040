//! Sparse PCA: DC-PCA, baselines, deflation and regularization paths.

mod dcpca;
mod deflation;
mod sweep;
mod variance;

pub use dcpca::{
    check_psd, dcpca_solve, dcpca_step, generalized_power_step, gpower_recover, gpower_solve,
    gpower_step, power_method, power_method_from, power_step, scotlass_step,
};
pub use deflation::{
    deflate, hotelling_deflate, orthonormal_residual, orthonormalize, DeflationScheme, GS_TOL,
};
pub use sweep::{
    log_grid, rho_ceiling, sweep, tune_for_cardinality, SweepConfig, TradeoffCurve, TradeoffPoint,
    TuneSettings, TunedComponent,
};
pub use variance::{explained_variance, ExplainedVariance, PevConvention};

use crate::error::{Error, Result};
use crate::matcore::{align_sign, full_eigen, SymMatrix};
use crate::sgev::{cardinality, variational_renormalization, SgevConfig};

/// Starting point of each deflation stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitStrategy {
    /// `1/√n · 1`, or `solver.init` when set.
    Uniform,
    /// Leading eigenvector of the current (deflated) matrix.
    #[default]
    LeadingEigenvector,
}

/// How the sparsity level of each component is chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum Sparsity {
    /// Fixed `ρ̃` for every component (`solver.rho_tilde`).
    Rho,
    /// Tune `ρ̃` per component to hit these cardinalities.
    Targets(Vec<usize>),
}

#[derive(Debug, Clone)]
pub struct PcaConfig {
    pub solver: SgevConfig,
    pub n_components: usize,
    pub deflation: DeflationScheme,
    pub init: InitStrategy,
    pub sparsity: Sparsity,
    pub pev: PevConvention,
    pub tune: TuneSettings,
}

impl Default for PcaConfig {
    fn default() -> Self {
        Self {
            solver: SgevConfig::default(),
            n_components: 1,
            deflation: DeflationScheme::default(),
            init: InitStrategy::default(),
            sparsity: Sparsity::Rho,
            pev: PevConvention::default(),
            tune: TuneSettings::default(),
        }
    }
}

impl PcaConfig {
    /// Per-component cardinality targets, one stage each.
    pub fn with_targets(targets: Vec<usize>) -> Self {
        Self {
            n_components: targets.len(),
            sparsity: Sparsity::Targets(targets),
            ..Self::default()
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        self.solver.validate()?;
        if self.n_components == 0 || self.n_components > n {
            return Err(Error::InvalidConfig(format!(
                "n_components must be in 1..={n}"
            )));
        }
        if let Sparsity::Targets(t) = &self.sparsity {
            if t.len() != self.n_components {
                return Err(Error::InvalidConfig(
                    "one target cardinality per component".into(),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentSet {
    /// Renormalized loadings, unit ℓ2 norm, largest entry positive.
    pub loadings: Vec<Vec<f64>>,
    /// Variance captured by each loading on its deflated matrix.
    pub variances: Vec<f64>,
    pub cardinalities: Vec<usize>,
    pub rho_tildes: Vec<f64>,
    /// Per-component PEV under `convention` on the original matrix.
    pub pev: Vec<f64>,
    pub cumulative_pev: f64,
    pub convention: PevConvention,
    pub iterations: Vec<usize>,
}

/// Extracts `n_components` sparse components with deflation between stages.
pub fn principal_components(a: &SymMatrix, config: &PcaConfig) -> Result<ComponentSet> {
    let n = a.n();
    config.validate(n)?;
    let identity = SymMatrix::identity(n);
    let mut current = a.clone();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut out = ComponentSet {
        loadings: Vec::new(),
        variances: Vec::new(),
        cardinalities: Vec::new(),
        rho_tildes: Vec::new(),
        pev: Vec::new(),
        cumulative_pev: 0.0,
        convention: config.pev,
        iterations: Vec::new(),
    };
    check_psd(a)?;
    for stage in 0..config.n_components {
        let mut solver = config.solver.clone();
        if config.init == InitStrategy::LeadingEigenvector {
            let mut v = full_eigen(&current)?.vectors.swap_remove(0);
            align_sign(&mut v);
            solver.init = Some(v);
        }
        let (rho, loading, variance, iterations) = match &config.sparsity {
            Sparsity::Targets(t) => {
                let tuned = tune_for_cardinality(&current, t[stage], &solver, &config.tune)?;
                (
                    tuned.rho_tilde,
                    tuned.loading,
                    tuned.variance,
                    tuned.solution.iterations,
                )
            }
            Sparsity::Rho => {
                let (sol, _) = dcpca::dcpca_run(&current, &solver)?;
                if sol.cardinality == 0 {
                    return Err(Error::AllThresholded);
                }
                let r = variational_renormalization(&sol.x, &current, &identity, solver.zero_tol)?;
                (solver.rho_tilde, r.x, r.objective, sol.iterations)
            }
        };
        let mut loading = loading;
        align_sign(&mut loading);
        log::debug!(
            "component {stage}: rho = {rho:e}, cardinality = {}",
            cardinality(&loading, solver.zero_tol)
        );

        let q = orthonormal_residual(&basis, &loading).map_err(|e| match e {
            Error::RankCollapse { pivot, .. } => Error::RankCollapse {
                index: stage,
                pivot,
            },
            e => e,
        })?;
        basis.push(q);
        out.cardinalities
            .push(cardinality(&loading, solver.zero_tol));
        out.loadings.push(loading);
        out.variances.push(variance);
        out.rho_tildes.push(rho);
        out.iterations.push(iterations);
        if stage + 1 < config.n_components {
            current = match config.deflation {
                DeflationScheme::OrthogonalizedHotelling => {
                    hotelling_deflate(&current, basis.last().expect("pushed"))?
                }
                DeflationScheme::Projection => deflate(a, &out.loadings)?,
            };
        }
    }
    let ev = explained_variance(a, &out.loadings, config.pev)?;
    out.pev = ev.per_component;
    out.cumulative_pev = ev.cumulative;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_components_are_eigenvectors() {
        let a = SymMatrix::diagonal_from(&[4.0, 3.0, 2.0, 1.0]);
        let cfg = PcaConfig {
            n_components: 2,
            ..PcaConfig::default()
        };
        let c = principal_components(&a, &cfg).unwrap();
        assert!((c.cumulative_pev - 0.7).abs() < 1e-9);
        assert!((c.loadings[0][0] - 1.0).abs() < 1e-9 && (c.loadings[1][1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn invalid_component_count() {
        let a = SymMatrix::identity(2);
        let cfg = PcaConfig {
            n_components: 3,
            ..PcaConfig::default()
        };
        assert!(principal_components(&a, &cfg).is_err());
    }
}
