//! Stochastic block model generator.

use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SbmSpec {
    pub num_communities: usize,
    pub community_size: usize,
    /// Edge probability inside a community.
    pub p_in: f64,
    /// Edge probability across communities.
    pub p_out: f64,
    pub seed: u64,
}

impl SbmSpec {
    pub fn num_nodes(&self) -> usize {
        self.num_communities * self.community_size
    }

    /// Expected number of edges.
    pub fn expected_edges(&self) -> f64 {
        let s = self.community_size as f64;
        let b = self.num_communities as f64;
        b * s * (s - 1.0) / 2.0 * self.p_in + b * (b - 1.0) / 2.0 * s * s * self.p_out
    }
}

/// Calls `hit` with the index of every success in `total` Bernoulli(p)
/// trials, jumping between successes with geometric gaps.
fn geometric_hits<R: Rng>(total: u64, p: f64, rng: &mut R, mut hit: impl FnMut(u64)) {
    if p <= 0.0 || total == 0 {
        return;
    }
    if p >= 1.0 {
        (0..total).for_each(hit);
        return;
    }
    let log_q = (-p).ln_1p();
    let mut idx: i64 = -1;
    loop {
        let u: f64 = rng.random();
        let skip = ((-u).ln_1p() / log_q).floor();
        if !skip.is_finite() || idx as f64 + 1.0 + skip >= total as f64 {
            return;
        }
        idx += 1 + skip as i64;
        hit(idx as u64);
    }
}

/// Samples an SBM graph and its block labels.
///
/// Node `v` belongs to block `v / community_size`. Runtime is linear in the
/// number of generated edges plus the number of block pairs.
pub fn generate_sbm(spec: &SbmSpec) -> Result<(Graph, Vec<usize>)> {
    let n = spec.num_nodes();
    if n < 2 {
        return Err(Error::InvalidArgument(format!("an SBM needs at least 2 nodes (got {n})")));
    }
    for (name, p) in [("p_in", spec.p_in), ("p_out", spec.p_out)] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("{name} must lie in [0, 1] (got {p})")));
        }
    }
    if spec.p_out > spec.p_in {
        warn!("p_out = {} exceeds p_in = {}", spec.p_out, spec.p_in);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let s = spec.community_size;
    let mut edges = Vec::with_capacity(spec.expected_edges().ceil() as usize);
    for block in 0..spec.num_communities {
        let base = block * s;
        // pair (i, j), i > j, has linear index i(i-1)/2 + j
        let mut row = 1usize;
        let mut row_start = 0u64;
        geometric_hits((s * s.saturating_sub(1) / 2) as u64, spec.p_in, &mut rng, |idx| {
            while idx >= row_start + row as u64 {
                row_start += row as u64;
                row += 1;
            }
            edges.push((base + row, base + (idx - row_start) as usize));
        });
    }
    for a in 0..spec.num_communities {
        for b in (a + 1)..spec.num_communities {
            geometric_hits((s * s) as u64, spec.p_out, &mut rng, |idx| {
                let (i, j) = ((idx / s as u64) as usize, (idx % s as u64) as usize);
                edges.push((a * s + i, b * s + j));
            });
        }
    }
    let labels = (0..n).map(|v| v / s).collect();
    Ok((Graph::from_edges(n, &edges)?, labels))
}
