use ndarray::{Array2, ArrayView2};

use super::{ImportanceDistribution, SubgraphSample};
use crate::error::{Error, Result};

/// Size limits of the ordered-subset enumeration in [`inclusion_prob_exact`].
pub const ENUMERATION_MAX_N: usize = 10;
pub const ENUMERATION_MAX_NS: usize = 4;

/// Largest graph handled by the subset dynamic program.
const SUBSET_DP_MAX_N: usize = 20;

/// Inclusion probability of node `i` (or of the pair `(i, j)`) when `n_s`
/// nodes are drawn independently with replacement.
///
/// Node: `1 - (1 - p_i)^n_s`.
/// Pair: `1 - [(1 - p_i)^n_s + (1 - p_j)^n_s - (1 - p_i - p_j)^n_s]`.
/// The self-pair `(i, i)` reduces to the node form.
pub fn inclusion_prob_with_replacement(
    dist: &ImportanceDistribution,
    n_s: usize,
    i: usize,
    j: Option<usize>,
) -> f64 {
    let p = dist.probs();
    let k = n_s as i32;
    let miss_i = (1.0 - p[i]).powi(k);
    match j {
        None => 1.0 - miss_i,
        Some(j) if j == i => 1.0 - miss_i,
        Some(j) => {
            let miss_j = (1.0 - p[j]).powi(k);
            let miss_both = (1.0 - p[i] - p[j]).max(0.0).powi(k);
            1.0 - (miss_i + miss_j - miss_both)
        }
    }
}

/// Exact inclusion probability without replacement, by summing
/// `p_u1 · Π_k p_uk / (1 - Σ_{k'<k} p_uk')` over every ordered sequence of
/// `n_s` distinct nodes that contains `i` (and `j`).
///
/// Cost grows as `n! / (n - n_s)!`, so the instance is limited to
/// `n <= ENUMERATION_MAX_N` and `n_s <= ENUMERATION_MAX_NS`.
pub fn inclusion_prob_exact(
    dist: &ImportanceDistribution,
    n_s: usize,
    i: usize,
    j: Option<usize>,
) -> Result<f64> {
    let n = dist.len();
    if n > ENUMERATION_MAX_N || n_s > ENUMERATION_MAX_NS {
        return Err(Error::TooLargeForEnumeration {
            n,
            ns: n_s,
            max_n: ENUMERATION_MAX_N,
            max_ns: ENUMERATION_MAX_NS,
        });
    }
    check_support(dist, n_s)?;
    let targets: Vec<usize> = match j {
        Some(j) if j != i => vec![i, j],
        _ => vec![i],
    };
    let mut used = vec![false; n];
    Ok(enumerate(dist.probs(), n_s, &targets, &mut used, 1.0, 0.0, 0))
}

fn enumerate(
    p: &[f64],
    remaining: usize,
    targets: &[usize],
    used: &mut [bool],
    weight: f64,
    mass: f64,
    depth: usize,
) -> f64 {
    if remaining == 0 {
        return if targets.iter().all(|&t| used[t]) { weight } else { 0.0 };
    }
    let mut total = 0.0;
    for u in 0..p.len() {
        if used[u] || p[u] == 0.0 {
            continue;
        }
        let step = if depth == 0 { p[u] } else { p[u] / (1.0 - mass) };
        used[u] = true;
        total += enumerate(p, remaining - 1, targets, used, weight * step, mass + p[u], depth + 1);
        used[u] = false;
    }
    total
}

fn check_support(dist: &ImportanceDistribution, n_s: usize) -> Result<()> {
    let available = dist.support_size();
    if n_s > available {
        return Err(Error::NotEnoughNodes {
            requested: n_s,
            available,
        });
    }
    Ok(())
}

/// `P((i, j) ∈ V_S²)` for every pair, diagonal holding node probabilities.
///
/// Without replacement this runs a dynamic program over unordered drawn sets:
/// `P(T) = Σ_{u ∈ T} P(T \ u) · p_u / (1 - mass(T \ u))`, in `O(2^n · n)`.
pub fn inclusion_matrix(
    dist: &ImportanceDistribution,
    n_s: usize,
    with_replacement: bool,
) -> Result<Array2<f64>> {
    let n = dist.len();
    let mut out = Array2::zeros((n, n));
    if with_replacement {
        for i in 0..n {
            for j in 0..n {
                out[[i, j]] = inclusion_prob_with_replacement(dist, n_s, i, Some(j));
            }
        }
        return Ok(out);
    }
    if n > SUBSET_DP_MAX_N {
        return Err(Error::TooLargeForEnumeration {
            n,
            ns: n_s,
            max_n: SUBSET_DP_MAX_N,
            max_ns: n_s,
        });
    }
    check_support(dist, n_s)?;
    let p = dist.probs();
    let states = 1usize << n;
    let mut mass = vec![0.0f64; states];
    for mask in 1..states {
        let low = mask.trailing_zeros() as usize;
        mass[mask] = mass[mask & (mask - 1)] + p[low];
    }
    let mut prob = vec![0.0f64; states];
    prob[0] = 1.0;
    for mask in 1..states {
        if mask.count_ones() as usize > n_s {
            continue;
        }
        let mut acc = 0.0;
        let mut bits = mask;
        while bits != 0 {
            let u = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let prev = mask ^ (1 << u);
            let rest = 1.0 - mass[prev];
            if prob[prev] > 0.0 && p[u] > 0.0 && rest > 0.0 {
                acc += prob[prev] * p[u] / rest;
            }
        }
        prob[mask] = acc;
    }
    for (mask, &pm) in prob.iter().enumerate() {
        if mask.count_ones() as usize != n_s || pm == 0.0 {
            continue;
        }
        let members: Vec<usize> = (0..n).filter(|&u| mask >> u & 1 == 1).collect();
        for &a in &members {
            for &b in &members {
                out[[a, b]] += pm;
            }
        }
    }
    Ok(out)
}

/// Expected approximate loss
/// `E[L_S] = (1 / n_s²) Σ_{(i,j)} P((i,j) ∈ V_S²) · L_ij`, diagonal included.
pub fn expected_fastgae_loss(
    dist: &ImportanceDistribution,
    n_s: usize,
    losses: ArrayView2<'_, f64>,
    with_replacement: bool,
) -> Result<f64> {
    let n = dist.len();
    if losses.dim() != (n, n) {
        return Err(Error::DimensionMismatch(format!(
            "loss matrix is {:?}, expected {n}x{n}",
            losses.dim()
        )));
    }
    let inclusion = inclusion_matrix(dist, n_s, with_replacement)?;
    let total: f64 = inclusion.iter().zip(losses.iter()).map(|(q, l)| q * l).sum();
    Ok(total / (n_s * n_s) as f64)
}

/// Realized approximate loss of one sample, `(1 / n_s²) Σ_{(i,j) ∈ V_S²} L_ij`
/// with `V_S` the set of distinct drawn nodes and `n_s` the number of draws.
pub fn fastgae_loss(losses: ArrayView2<'_, f64>, sample: &SubgraphSample) -> f64 {
    let nodes = sample.distinct_sorted();
    let mut total = 0.0;
    for &i in &nodes {
        for &j in &nodes {
            total += losses[[i, j]];
        }
    }
    let ns = sample.size() as f64;
    total / (ns * ns)
}

/// Node-level term `L_S(i) = (1 / n_s) Σ_{j ∈ V_S} L_ij`.
pub fn node_level_loss(losses: ArrayView2<'_, f64>, sample: &SubgraphSample, i: usize) -> f64 {
    let total: f64 = sample.distinct_sorted().iter().map(|&j| losses[[i, j]]).sum();
    total / sample.size() as f64
}
