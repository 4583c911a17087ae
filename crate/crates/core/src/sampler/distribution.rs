use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{core_numbers, degrees, Graph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ImportanceMeasure {
    Uniform,
    Degree,
    Core,
}

/// Per-node probabilities `p_i = f(i)^alpha / sum_j f(j)^alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceDistribution {
    measure: ImportanceMeasure,
    sharpening_alpha: f64,
    probs: Vec<f64>,
}

impl ImportanceDistribution {
    /// From raw importance scores. `alpha == 0` gives the uniform distribution
    /// regardless of the scores; otherwise zero scores get zero mass.
    pub fn from_scores(
        measure: ImportanceMeasure,
        scores: &[f64],
        sharpening_alpha: f64,
    ) -> Result<Self> {
        if !(sharpening_alpha >= 0.0 && sharpening_alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "sharpening exponent must be finite and >= 0 (got {sharpening_alpha})"
            )));
        }
        if scores.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let n = scores.len();
        if measure == ImportanceMeasure::Uniform || sharpening_alpha == 0.0 {
            return Ok(Self {
                measure,
                sharpening_alpha,
                probs: vec![1.0 / n as f64; n],
            });
        }
        if let Some(bad) = scores.iter().find(|s| !(**s >= 0.0 && s.is_finite())) {
            return Err(Error::InvalidArgument(format!(
                "importance scores must be finite and >= 0 (got {bad})"
            )));
        }
        let weights: Vec<f64> = scores
            .iter()
            .map(|&s| if s > 0.0 { s.powf(sharpening_alpha) } else { 0.0 })
            .collect();
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::ZeroImportance);
        }
        Ok(Self {
            measure,
            sharpening_alpha,
            probs: weights.into_iter().map(|w| w / total).collect(),
        })
    }

    /// Explicit probabilities, renormalized to sum to one.
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        Self::from_scores(ImportanceMeasure::Degree, &probs, 1.0)
    }

    pub fn measure(&self) -> ImportanceMeasure {
        self.measure
    }

    pub fn sharpening_alpha(&self) -> f64 {
        self.sharpening_alpha
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn support_size(&self) -> usize {
        self.probs.iter().filter(|p| **p > 0.0).count()
    }
}

/// Importance distribution over the nodes of `g` for the given measure.
pub fn build_distribution(
    g: &Graph,
    measure: ImportanceMeasure,
    sharpening_alpha: f64,
) -> Result<ImportanceDistribution> {
    let scores: Vec<f64> = match measure {
        ImportanceMeasure::Uniform => vec![1.0; g.num_nodes()],
        ImportanceMeasure::Degree => degrees(g).into_iter().map(|d| d as f64).collect(),
        ImportanceMeasure::Core => core_numbers(g).into_iter().map(|c| c as f64).collect(),
    };
    ImportanceDistribution::from_scores(measure, &scores, sharpening_alpha)
}
