use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Graph;
use crate::error::{Error, Result};

/// Attempts allowed per requested negative pair.
pub(crate) const REJECTION_FACTOR: usize = 1000;

/// Link prediction split: a masked training graph plus held-out positive and
/// negative pairs. Pairs are stored as `(u, v)` with `u < v`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSplit {
    pub train_graph: Graph,
    pub val_pos: Vec<(usize, usize)>,
    pub val_neg: Vec<(usize, usize)>,
    pub test_pos: Vec<(usize, usize)>,
    pub test_neg: Vec<(usize, usize)>,
    pub seed: u64,
}

/// Removes `round(val_frac * m)` validation and `round(test_frac * m)` test
/// edges uniformly at random and pairs each list with as many non-edges of
/// the original graph. Each undirected edge counts once.
pub fn split_edges(g: &Graph, val_frac: f64, test_frac: f64, seed: u64) -> Result<EdgeSplit> {
    if !(val_frac >= 0.0 && test_frac >= 0.0 && val_frac + test_frac < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "need 0 <= val_frac + test_frac < 1 (got {val_frac} + {test_frac})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(usize, usize)> = g.edges().collect();
    let m = edges.len();
    let n_val = (val_frac * m as f64).round() as usize;
    let n_test = (test_frac * m as f64).round() as usize;
    edges.shuffle(&mut rng);

    let val_pos = edges[..n_val].to_vec();
    let test_pos = edges[n_val..n_val + n_test].to_vec();
    let train_graph = g.with_edges(&edges[n_val + n_test..])?;

    let mut taken = HashSet::new();
    let val_neg = sample_non_edges(g, n_val, &mut taken, &mut rng)?;
    let test_neg = sample_non_edges(g, n_test, &mut taken, &mut rng)?;

    Ok(EdgeSplit {
        train_graph,
        val_pos,
        val_neg,
        test_pos,
        test_neg,
        seed,
    })
}

/// Uniform non-edges of `g` by rejection, excluding pairs already in `taken`
/// (which is extended). Gives up after `REJECTION_FACTOR * count` draws.
pub(crate) fn sample_non_edges<R: Rng + ?Sized>(
    g: &Graph,
    count: usize,
    taken: &mut HashSet<(usize, usize)>,
    rng: &mut R,
) -> Result<Vec<(usize, usize)>> {
    let n = g.num_nodes();
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return Ok(out);
    }
    let budget = REJECTION_FACTOR * count;
    let mut attempts = 0;
    while out.len() < count {
        if attempts >= budget || n < 2 {
            return Err(Error::RejectionLimit {
                attempts,
                found: out.len(),
                needed: count,
            });
        }
        attempts += 1;
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u == v {
            continue;
        }
        let pair = (u.min(v), u.max(v));
        if g.has_edge(pair.0, pair.1) || !taken.insert(pair) {
            continue;
        }
        out.push(pair);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn counts_follow_fractions() {
        let g = ring(100);
        assert_eq!(g.num_edges(), 100);
        let s = split_edges(&g, 0.05, 0.10, 7).unwrap();
        assert_eq!(s.val_pos.len(), 5);
        assert_eq!(s.test_pos.len(), 10);
        assert_eq!(s.val_neg.len(), 5);
        assert_eq!(s.test_neg.len(), 10);
        assert_eq!(s.train_graph.num_edges(), 85);
        assert_eq!(s.train_graph.num_nodes(), 100);
    }

    #[test]
    fn zero_fractions_keep_graph() {
        let g = ring(10);
        let s = split_edges(&g, 0.0, 0.0, 1).unwrap();
        assert_eq!(s.train_graph, g);
        assert!(s.val_pos.is_empty() && s.val_neg.is_empty());
        assert!(s.test_pos.is_empty() && s.test_neg.is_empty());
    }

    #[test]
    fn deterministic_per_seed() {
        let g = ring(50);
        assert_eq!(split_edges(&g, 0.1, 0.2, 3).unwrap(), split_edges(&g, 0.1, 0.2, 3).unwrap());
        assert_ne!(
            split_edges(&g, 0.1, 0.2, 3).unwrap().test_pos,
            split_edges(&g, 0.1, 0.2, 4).unwrap().test_pos
        );
    }

    #[test]
    fn disjointness() {
        let g = ring(60);
        let s = split_edges(&g, 0.1, 0.2, 11).unwrap();
        let mut seen = HashSet::new();
        for p in s
            .val_pos
            .iter()
            .chain(&s.test_pos)
            .chain(&s.val_neg)
            .chain(&s.test_neg)
            .copied()
            .chain(s.train_graph.edges())
        {
            assert!(seen.insert(p), "pair {p:?} appears twice");
        }
        for &(u, v) in s.val_neg.iter().chain(&s.test_neg) {
            assert!(u < v && !g.has_edge(u, v));
        }
        for &(u, v) in s.val_pos.iter().chain(&s.test_pos) {
            assert!(g.has_edge(u, v) && !s.train_graph.has_edge(u, v));
        }
    }

    #[test]
    fn dense_graph_runs_out_of_negatives() {
        let mut edges = Vec::new();
        for u in 0..6 {
            for v in u + 1..6 {
                edges.push((u, v));
            }
        }
        let k6 = Graph::from_edges(6, &edges).unwrap();
        assert!(matches!(
            split_edges(&k6, 0.2, 0.2, 0),
            Err(Error::RejectionLimit { .. })
        ));
    }

    #[test]
    fn bad_fractions() {
        let g = ring(10);
        assert!(split_edges(&g, 0.5, 0.5, 0).is_err());
        assert!(split_edges(&g, -0.1, 0.1, 0).is_err());
    }
}
