use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reconstruction loss the concentration bound is derived for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossKind {
    CrossEntropy,
    Frobenius,
}

/// Parameters of the threshold subgraph size.
///
/// `confidence_alpha` is the tolerated probability of a node-level deviation
/// of at least `gamma`; `epsilon` is the cap on decoded probabilities,
/// `Â_ij ∈ [ε, 1 − ε]`, that bounds the cross-entropy terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdParams {
    pub gamma: f64,
    pub confidence_alpha: f64,
    pub epsilon: f64,
    pub loss_kind: LossKind,
}

impl Default for ThresholdParams {
    fn default() -> Self {
        Self {
            gamma: 1.0,
            confidence_alpha: 0.1,
            epsilon: 0.001,
            loss_kind: LossKind::CrossEntropy,
        }
    }
}

impl ThresholdParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidArgument(format!("gamma must be > 0 (got {})", self.gamma)));
        }
        if !(self.confidence_alpha > 0.0 && self.confidence_alpha < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "confidence must lie in (0, 1) (got {})",
                self.confidence_alpha
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must lie in (0, 1) (got {})",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// The constant `C` in `n_S* = C * sqrt(n)`.
///
/// Cross entropy: `sqrt(-ln(α/2) · ln(ε)² / (2γ²))`.
/// Frobenius: `sqrt(-ln(α/2) / (2γ²))`, no cap needed since terms lie in `[0, 1]`.
pub fn threshold_constant(params: &ThresholdParams) -> f64 {
    let tail = -(params.confidence_alpha / 2.0).ln();
    let range_sq = match params.loss_kind {
        LossKind::CrossEntropy => params.epsilon.ln().powi(2),
        LossKind::Frobenius => 1.0,
    };
    (tail * range_sq / (2.0 * params.gamma * params.gamma)).sqrt()
}

/// `round(C * sqrt(n))`, capped at `n`.
pub fn threshold_subgraph_size(n: usize, params: &ThresholdParams) -> usize {
    debug_assert!(params.validate().is_ok());
    let size = (threshold_constant(params) * (n as f64).sqrt()).round();
    (size as usize).min(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_sizes() {
        let p = ThresholdParams::default();
        let cases = [
            (2708, 440),
            (3327, 488),
            (19717, 1187),
            (100000, 2673),
            (875713, 7911),
            (3223589, 15179),
            (3774768, 16425),
        ];
        for (n, expected) in cases {
            assert_eq!(threshold_subgraph_size(n, &p), expected, "n = {n}");
        }
    }

    #[test]
    fn frobenius_constant() {
        let p = ThresholdParams {
            loss_kind: LossKind::Frobenius,
            ..Default::default()
        };
        let expected = ((-(0.05f64).ln() / 2.0).sqrt() * 2708f64.sqrt()).round() as usize;
        assert_eq!(expected, 64);
        assert_eq!(threshold_subgraph_size(2708, &p), expected);
    }

    #[test]
    fn capped_at_n() {
        let p = ThresholdParams::default();
        assert_eq!(threshold_subgraph_size(1, &p), 1);
        assert_eq!(threshold_subgraph_size(50, &p), 50);
    }

    #[test]
    fn monotonicity() {
        let base = ThresholdParams::default();
        let mut last = 0;
        for n in (100..200_000).step_by(997) {
            let s = threshold_subgraph_size(n, &base);
            assert!(s >= last);
            last = s;
        }
        let n = 1_000_000;
        let tighter = ThresholdParams { epsilon: 1e-5, ..base };
        assert!(threshold_subgraph_size(n, &tighter) > threshold_subgraph_size(n, &base));
        let looser = ThresholdParams { gamma: 2.0, ..base };
        assert!(threshold_subgraph_size(n, &looser) < threshold_subgraph_size(n, &base));
    }

    #[test]
    fn validation() {
        assert!(ThresholdParams::default().validate().is_ok());
        assert!(ThresholdParams { gamma: 0.0, ..Default::default() }.validate().is_err());
        assert!(ThresholdParams { confidence_alpha: 1.0, ..Default::default() }.validate().is_err());
        assert!(ThresholdParams { epsilon: 0.0, ..Default::default() }.validate().is_err());
    }
}
