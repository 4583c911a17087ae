use std::collections::HashMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use super::ImportanceDistribution;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Node subset to decode at one training iteration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgraphSample {
    /// Nodes in draw order. May repeat when drawn with replacement.
    pub nodes: Vec<usize>,
    /// Induced edges as `(a, b)` positions into `nodes`, each edge once.
    /// With repeats, the first occurrence of a node is used.
    pub pos_pairs: Vec<(usize, usize)>,
    pub with_replacement: bool,
}

impl SubgraphSample {
    /// Number of draws `n_S`.
    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    /// The node set `V_S`, sorted.
    pub fn distinct_sorted(&self) -> Vec<usize> {
        let mut v = self.nodes.clone();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Draws `n_s` nodes from `dist` and extracts the subgraph they induce in `g`.
///
/// Without replacement this uses exponential keys: node `i` gets
/// `k_i = E_i / p_i` with `E_i ~ Exp(1)`, and the `n_s` smallest keys in
/// increasing order have the same law as `n_s` sequential draws with the
/// remaining mass renormalized after each draw. Cost is `O(n + n_s log n_s)`
/// for the draw and `O(sum of sampled degrees)` for the induced edges.
pub fn sample_nodes<R: Rng + ?Sized>(
    g: &Graph,
    dist: &ImportanceDistribution,
    n_s: usize,
    with_replacement: bool,
    rng: &mut R,
) -> Result<SubgraphSample> {
    if dist.len() != g.num_nodes() {
        return Err(Error::DimensionMismatch(format!(
            "distribution covers {} nodes, graph has {}",
            dist.len(),
            g.num_nodes()
        )));
    }
    if n_s == 0 {
        return Err(Error::InvalidArgument("subgraph size must be >= 1".into()));
    }
    let nodes = if with_replacement {
        draw_with_replacement(dist, n_s, rng)?
    } else {
        draw_without_replacement(dist, n_s, rng)?
    };
    let pos_pairs = induced_pairs(g, &nodes);
    Ok(SubgraphSample {
        nodes,
        pos_pairs,
        with_replacement,
    })
}

fn draw_without_replacement<R: Rng + ?Sized>(
    dist: &ImportanceDistribution,
    n_s: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let available = dist.support_size();
    if n_s > available {
        return Err(Error::NotEnoughNodes {
            requested: n_s,
            available,
        });
    }
    let mut keyed: Vec<(f64, usize)> = Vec::with_capacity(available);
    for (i, &p) in dist.probs().iter().enumerate() {
        // consume one uniform per node so the stream does not depend on the support
        let u: f64 = rng.random();
        if p > 0.0 {
            keyed.push((-(1.0 - u).ln() / p, i));
        }
    }
    let by_key = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if n_s < keyed.len() {
        keyed.select_nth_unstable_by(n_s - 1, by_key);
        keyed.truncate(n_s);
    }
    keyed.sort_unstable_by(by_key);
    Ok(keyed.into_iter().map(|(_, i)| i).collect())
}

fn draw_with_replacement<R: Rng + ?Sized>(
    dist: &ImportanceDistribution,
    n_s: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let index = WeightedIndex::new(dist.probs())
        .map_err(|e| Error::InvalidArgument(format!("invalid sampling weights: {e}")))?;
    Ok((0..n_s).map(|_| index.sample(rng)).collect())
}

fn induced_pairs(g: &Graph, nodes: &[usize]) -> Vec<(usize, usize)> {
    let mut position: HashMap<usize, usize> = HashMap::with_capacity(nodes.len());
    for (a, &u) in nodes.iter().enumerate() {
        position.entry(u).or_insert(a);
    }
    let mut pairs = Vec::new();
    for (a, &u) in nodes.iter().enumerate() {
        if position[&u] != a {
            continue;
        }
        for &v in g.neighbors(u) {
            if v > u {
                if let Some(&b) = position.get(&v) {
                    pairs.push((a, b));
                }
            }
        }
    }
    pairs
}
