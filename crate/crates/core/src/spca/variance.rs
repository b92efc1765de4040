//! Proportion of explained variance for possibly correlated loadings.

use crate::error::{Error, Result};
use crate::matcore::{Matrix, SpdFactor, SymMatrix};

use super::deflation::orthonormalize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PevConvention {
    /// Adjusted variance: squared diagonal of `R` where `VᵀAV = RᵀR`.
    Adjusted,
    /// Variance of the spanned subspace: diagonal of `QᵀAQ` for the
    /// Gram–Schmidt basis `Q` of the loadings; sums to `tr(QᵀAQ)`.
    #[default]
    Subspace,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExplainedVariance {
    /// Per-component fraction of `tr(A)`.
    pub per_component: Vec<f64>,
    pub cumulative: f64,
}

pub fn explained_variance(
    a: &SymMatrix,
    loadings: &[Vec<f64>],
    convention: PevConvention,
) -> Result<ExplainedVariance> {
    let n = a.n();
    for v in loadings {
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: v.len(),
            });
        }
    }
    let total = a.trace();
    if !(total > 0.0) {
        return Err(Error::InvalidInput(
            "explained variance needs a positive trace".into(),
        ));
    }
    let raw: Vec<f64> = match convention {
        PevConvention::Subspace => orthonormalize(loadings)?
            .iter()
            .map(|q| a.quad_form(q))
            .collect(),
        PevConvention::Adjusted => {
            if loadings.is_empty() {
                Vec::new()
            } else {
                let m = a.congruence(&Matrix::from_columns(loadings));
                let f = SpdFactor::new(&m).map_err(|e| match e {
                    Error::NotPositiveDefinite { index, pivot } => {
                        Error::RankCollapse { index, pivot }
                    }
                    e => e,
                })?;
                (0..loadings.len()).map(|j| f.l(j, j).powi(2)).collect()
            }
        }
    };
    let per_component: Vec<f64> = raw.iter().map(|v| v / total).collect();
    let cumulative = per_component.iter().sum();
    Ok(ExplainedVariance {
        per_component,
        cumulative,
    })
}
