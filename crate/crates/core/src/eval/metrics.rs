use std::cmp::Ordering;

use ndarray::ArrayView2;

use crate::error::{Error, Result};
use crate::model::decode_pair;

/// Decoder scores of held-out positive and negative pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredPairs {
    pos: Vec<f64>,
    neg: Vec<f64>,
}

impl ScoredPairs {
    pub fn new(pos: Vec<f64>, neg: Vec<f64>) -> Result<Self> {
        if pos.is_empty() || neg.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "need positive and negative scores (got {} and {})",
                pos.len(),
                neg.len()
            )));
        }
        if pos.iter().chain(&neg).any(|s| !s.is_finite()) {
            return Err(Error::InvalidArgument("scores must be finite".into()));
        }
        Ok(Self { pos, neg })
    }

    pub fn pos(&self) -> &[f64] {
        &self.pos
    }

    pub fn neg(&self) -> &[f64] {
        &self.neg
    }
}

/// Scores `σ(z_i · z_j)` for each listed pair.
pub fn score_pairs(
    z: ArrayView2<'_, f64>,
    pos: &[(usize, usize)],
    neg: &[(usize, usize)],
) -> Result<ScoredPairs> {
    let score = |pairs: &[(usize, usize)]| pairs.iter().map(|&(i, j)| decode_pair(z, i, j)).collect();
    ScoredPairs::new(score(pos), score(neg))
}

/// Area under the ROC curve from the Mann-Whitney rank sum; ties get
/// average ranks and so count one half.
pub fn auc(sp: &ScoredPairs) -> f64 {
    let mut all: Vec<(f64, bool)> = sp
        .pos
        .iter()
        .map(|&s| (s, true))
        .chain(sp.neg.iter().map(|&s| (s, false)))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut rank_sum = 0.0;
    let mut start = 0;
    while start < all.len() {
        let mut end = start;
        while end < all.len() && all[end].0 == all[start].0 {
            end += 1;
        }
        // 1-based ranks start+1 ..= end share their mean
        let mid = (start + end + 1) as f64 / 2.0;
        rank_sum += mid * all[start..end].iter().filter(|e| e.1).count() as f64;
        start = end;
    }
    let (p, q) = (sp.pos.len() as f64, sp.neg.len() as f64);
    (rank_sum - p * (p + 1.0) / 2.0) / (p * q)
}

/// Average precision `Σ_k (R_k - R_{k-1}) P_k` over the ranking by
/// decreasing score. Within a tie, negatives are ranked first.
pub fn average_precision(sp: &ScoredPairs) -> f64 {
    let mut all: Vec<(f64, bool)> = sp
        .pos
        .iter()
        .map(|&s| (s, true))
        .chain(sp.neg.iter().map(|&s| (s, false)))
        .collect();
    all.sort_by(|a, b| match b.0.total_cmp(&a.0) {
        Ordering::Equal => a.1.cmp(&b.1),
        other => other,
    });
    let total_pos = sp.pos.len() as f64;
    let mut hits = 0usize;
    let mut ap = 0.0;
    for (k, &(_, positive)) in all.iter().enumerate() {
        if positive {
            hits += 1;
            ap += hits as f64 / (k + 1) as f64;
        }
    }
    ap / total_pos
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn sp(pos: &[f64], neg: &[f64]) -> ScoredPairs {
        ScoredPairs::new(pos.to_vec(), neg.to_vec()).unwrap()
    }

    /// Brute-force pair counting.
    fn auc_oracle(pos: &[f64], neg: &[f64]) -> f64 {
        let mut wins = 0.0;
        for p in pos {
            for q in neg {
                wins += if p > q {
                    1.0
                } else if p == q {
                    0.5
                } else {
                    0.0
                };
            }
        }
        wins / (pos.len() * neg.len()) as f64
    }

    /// Mean over positives of precision at that positive's rank, with the
    /// rank counting every item scored strictly higher plus every tied negative.
    fn ap_oracle(pos: &[f64], neg: &[f64]) -> f64 {
        let mut total = 0.0;
        for (a, &p) in pos.iter().enumerate() {
            let higher_pos = pos
                .iter()
                .enumerate()
                .filter(|&(b, &q)| q > p || (q == p && b < a))
                .count();
            let higher_neg = neg.iter().filter(|&&q| q >= p).count();
            let rank = higher_pos + higher_neg + 1;
            total += (higher_pos + 1) as f64 / rank as f64;
        }
        total / pos.len() as f64
    }

    #[test]
    fn perfect_and_tied() {
        let s = sp(&[0.9, 0.8], &[0.1, 0.2, 0.3]);
        assert_eq!(auc(&s), 1.0);
        assert_eq!(average_precision(&s), 1.0);
        let t = sp(&[0.5, 0.5], &[0.5, 0.5, 0.5]);
        assert_eq!(auc(&t), 0.5);
    }

    #[test]
    fn one_positive_below_k_negatives() {
        for k in 1..6 {
            let neg: Vec<f64> = (0..k).map(|i| 0.9 - i as f64 * 0.01).collect();
            let s = sp(&[0.1], &neg);
            assert_abs_diff_eq!(average_precision(&s), 1.0 / (k as f64 + 1.0), epsilon = 1e-15);
            assert_eq!(auc(&s), 0.0);
        }
    }

    #[test]
    fn rejects_empty_and_nan() {
        assert!(ScoredPairs::new(vec![], vec![0.1]).is_err());
        assert!(ScoredPairs::new(vec![0.1], vec![f64::NAN]).is_err());
    }

    proptest! {
        #[test]
        fn matches_oracles(
            pos in proptest::collection::vec(0u8..12, 1..25),
            neg in proptest::collection::vec(0u8..12, 1..25),
        ) {
            // coarse integer scores force plenty of ties
            let pos: Vec<f64> = pos.into_iter().map(|v| v as f64 / 11.0).collect();
            let neg: Vec<f64> = neg.into_iter().map(|v| v as f64 / 11.0).collect();
            let s = sp(&pos, &neg);
            prop_assert!((auc(&s) - auc_oracle(&pos, &neg)).abs() < 1e-12);
            prop_assert!((average_precision(&s) - ap_oracle(&pos, &neg)).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&auc(&s)));
            prop_assert!((0.0..=1.0).contains(&average_precision(&s)));
        }

        #[test]
        fn auc_rank_invariance_and_complement(
            pos in proptest::collection::vec(-5.0f64..5.0, 1..30),
            neg in proptest::collection::vec(-5.0f64..5.0, 1..30),
        ) {
            let s = sp(&pos, &neg);
            let warped = sp(
                &pos.iter().map(|v| v.exp() * 3.0 + 1.0).collect::<Vec<_>>(),
                &neg.iter().map(|v| v.exp() * 3.0 + 1.0).collect::<Vec<_>>(),
            );
            prop_assert!((auc(&s) - auc(&warped)).abs() < 1e-12);
            let tie_free = pos.iter().all(|p| neg.iter().all(|q| p != q));
            if tie_free {
                let swapped = sp(&neg, &pos);
                prop_assert!((auc(&s) + auc(&swapped) - 1.0).abs() < 1e-12);
            }
        }
    }
}
