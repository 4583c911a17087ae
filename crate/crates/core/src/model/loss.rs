use std::collections::{HashMap, HashSet};

use ndarray::{Array2, ArrayView2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::split::sample_non_edges;
use crate::graph::Graph;

/// Weight `w` applied to positive pairs in the cross entropy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PosWeight {
    /// `(#pairs - #positives) / #positives`, computed per decoded pair set.
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossConfig {
    pub pos_weight: PosWeight,
    /// Decoded probabilities are clipped to `[clip_epsilon, 1 - clip_epsilon]`
    /// before taking logs.
    pub clip_epsilon: f64,
    /// VAE only: KL over all nodes rather than the sampled ones.
    pub kl_on_all_nodes: bool,
}

impl Default for LossConfig {
    fn default() -> Self {
        Self {
            pos_weight: PosWeight::Auto,
            clip_epsilon: 1e-7,
            kl_on_all_nodes: true,
        }
    }
}

impl LossConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.clip_epsilon > 0.0 && self.clip_epsilon < 0.5) {
            return Err(Error::InvalidArgument(format!(
                "clip_epsilon must lie in (0, 0.5) (got {})",
                self.clip_epsilon
            )));
        }
        if let PosWeight::Fixed(w) = self.pos_weight {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidArgument(format!("positive weight must be > 0 (got {w})")));
            }
        }
        Ok(())
    }
}

/// Node pairs the decoder reconstructs at one iteration.
#[derive(Debug, Clone, PartialEq)]
pub enum PairSet {
    /// Every ordered pair of these nodes, diagonal included. Targets come from
    /// `A + I`, so `(i, i)` is positive.
    Block(Vec<usize>),
    /// Explicit pairs with their targets.
    List {
        pairs: Vec<(usize, usize)>,
        labels: Vec<bool>,
    },
}

impl PairSet {
    pub fn len(&self) -> usize {
        match self {
            PairSet::Block(nodes) => nodes.len() * nodes.len(),
            PairSet::List { pairs, .. } => pairs.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Distinct nodes touched by the pair set, sorted.
    pub fn nodes(&self) -> Vec<usize> {
        let mut v: Vec<usize> = match self {
            PairSet::Block(nodes) => nodes.clone(),
            PairSet::List { pairs, .. } => pairs.iter().flat_map(|&(i, j)| [i, j]).collect(),
        };
        v.sort_unstable();
        v.dedup();
        v
    }
}

#[inline]
fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// `σ(z_i · z_j)`.
pub fn decode_pair(z: ArrayView2<'_, f64>, i: usize, j: usize) -> f64 {
    sigmoid(z.row(i).dot(&z.row(j)))
}

fn positive_weight(config: &LossConfig, total: usize, positives: usize) -> Result<f64> {
    match config.pos_weight {
        PosWeight::Fixed(w) => Ok(w),
        PosWeight::Auto if positives == 0 => Err(Error::NoPositives),
        // all-positive sets have nothing to balance against
        PosWeight::Auto if positives == total => Ok(1.0),
        PosWeight::Auto => Ok((total - positives) as f64 / positives as f64),
    }
}

/// Loss of one pair and its derivative with respect to the logit.
#[inline]
fn pair_term(logit: f64, positive: bool, w: f64, clip: f64) -> (f64, f64) {
    let s = sigmoid(logit);
    let inside = s > clip && s < 1.0 - clip;
    let p = s.clamp(clip, 1.0 - clip);
    if positive {
        (-w * p.ln(), if inside { -w * (1.0 - s) } else { 0.0 })
    } else {
        (-(1.0 - p).ln(), if inside { s } else { 0.0 })
    }
}

/// Weighted mean cross entropy over the pair set.
pub fn reconstruction_loss(
    z: ArrayView2<'_, f64>,
    graph: &Graph,
    pairs: &PairSet,
    config: &LossConfig,
) -> Result<f64> {
    Ok(evaluate(z, graph, pairs, config, false)?.0)
}

/// Loss and its gradient with respect to every row of `Z`; rows outside the
/// pair set get zero gradient.
pub fn reconstruction_loss_and_grad(
    z: ArrayView2<'_, f64>,
    graph: &Graph,
    pairs: &PairSet,
    config: &LossConfig,
) -> Result<(f64, Array2<f64>)> {
    let (loss, grad) = evaluate(z, graph, pairs, config, true)?;
    Ok((loss, grad.expect("gradient requested")))
}

fn evaluate(
    z: ArrayView2<'_, f64>,
    graph: &Graph,
    pairs: &PairSet,
    config: &LossConfig,
    want_grad: bool,
) -> Result<(f64, Option<Array2<f64>>)> {
    if pairs.is_empty() {
        return Err(Error::EmptyPairSet);
    }
    if z.nrows() != graph.num_nodes() {
        return Err(Error::DimensionMismatch(format!(
            "embeddings have {} rows, graph has {} nodes",
            z.nrows(),
            graph.num_nodes()
        )));
    }
    match pairs {
        PairSet::Block(nodes) => evaluate_block(z, graph, nodes, config, want_grad),
        PairSet::List { pairs, labels } => evaluate_list(z, pairs, labels, config, want_grad),
    }
}

fn evaluate_block(
    z: ArrayView2<'_, f64>,
    graph: &Graph,
    nodes: &[usize],
    config: &LossConfig,
    want_grad: bool,
) -> Result<(f64, Option<Array2<f64>>)> {
    let ns = nodes.len();
    let position: HashMap<usize, usize> = nodes.iter().enumerate().map(|(a, &u)| (u, a)).collect();
    let mut labels = vec![false; ns * ns];
    for (a, &u) in nodes.iter().enumerate() {
        labels[a * ns + a] = true;
        for v in graph.neighbors(u) {
            if let Some(&b) = position.get(v) {
                labels[a * ns + b] = true;
            }
        }
    }
    let total = ns * ns;
    let positives = labels.iter().filter(|&&y| y).count();
    let w = positive_weight(config, total, positives)?;
    let norm = 1.0 / total as f64;

    let zs = z.select(Axis(0), nodes);
    // logits, overwritten in place by d loss / d logit
    let mut scores = zs.dot(&zs.t());
    let mut loss = 0.0;
    for (s, &y) in scores.iter_mut().zip(labels.iter()) {
        let (l, g) = pair_term(*s, y, w, config.clip_epsilon);
        loss += l;
        *s = g * norm;
    }
    loss *= norm;
    if !want_grad {
        return Ok((loss, None));
    }
    let dzs = scores.dot(&zs) + scores.t().dot(&zs);
    let mut dz = Array2::zeros(z.raw_dim());
    for (a, &u) in nodes.iter().enumerate() {
        let mut row = dz.row_mut(u);
        row += &dzs.row(a);
    }
    Ok((loss, Some(dz)))
}

fn evaluate_list(
    z: ArrayView2<'_, f64>,
    pairs: &[(usize, usize)],
    labels: &[bool],
    config: &LossConfig,
    want_grad: bool,
) -> Result<(f64, Option<Array2<f64>>)> {
    if pairs.len() != labels.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} pairs but {} labels",
            pairs.len(),
            labels.len()
        )));
    }
    let n = z.nrows();
    if let Some(&(i, j)) = pairs.iter().find(|&&(i, j)| i >= n || j >= n) {
        return Err(Error::InvalidArgument(format!("pair ({i}, {j}) out of range for {n} nodes")));
    }
    let positives = labels.iter().filter(|&&y| y).count();
    let w = positive_weight(config, pairs.len(), positives)?;
    let norm = 1.0 / pairs.len() as f64;
    let mut loss = 0.0;
    let mut dz = want_grad.then(|| Array2::zeros(z.raw_dim()));
    for (&(i, j), &y) in pairs.iter().zip(labels) {
        let (zi, zj) = (z.row(i), z.row(j));
        let (l, g) = pair_term(zi.dot(&zj), y, w, config.clip_epsilon);
        loss += l;
        if let Some(dz) = dz.as_mut() {
            if g != 0.0 {
                let g = g * norm;
                dz.row_mut(i).scaled_add(g, &zj);
                dz.row_mut(j).scaled_add(g, &zi);
            }
        }
    }
    Ok((loss * norm, dz))
}

/// `Σ_i Σ_k -½ (1 + 2 log σ_ik - μ_ik² - σ_ik²) / n`, the KL divergence of
/// the posterior from a standard normal prior, averaged over nodes.
pub fn kl_divergence(mu: ArrayView2<'_, f64>, log_sigma: ArrayView2<'_, f64>) -> f64 {
    let n = mu.nrows().max(1);
    kl_sum(mu, log_sigma, None) / n as f64
}

pub(crate) fn kl_sum(mu: ArrayView2<'_, f64>, log_sigma: ArrayView2<'_, f64>, rows: Option<&[usize]>) -> f64 {
    let term = |m: f64, ls: f64| -0.5 * (1.0 + 2.0 * ls - m * m - (2.0 * ls).exp());
    match rows {
        None => mu.iter().zip(log_sigma.iter()).map(|(&m, &ls)| term(m, ls)).sum(),
        Some(rows) => rows
            .iter()
            .flat_map(|&i| mu.row(i).into_iter().zip(log_sigma.row(i)).map(|(&m, &ls)| term(m, ls)).collect::<Vec<_>>())
            .sum(),
    }
}

/// Gradients of `scale * KL sum` over `rows` (all rows when `None`).
pub(crate) fn kl_grad(
    mu: ArrayView2<'_, f64>,
    log_sigma: ArrayView2<'_, f64>,
    rows: Option<&[usize]>,
    scale: f64,
) -> (Array2<f64>, Array2<f64>) {
    let mut dmu = Array2::zeros(mu.raw_dim());
    let mut dls = Array2::zeros(mu.raw_dim());
    let mut fill = |i: usize| {
        for k in 0..mu.ncols() {
            dmu[[i, k]] = scale * mu[[i, k]];
            dls[[i, k]] = scale * ((2.0 * log_sigma[[i, k]]).exp() - 1.0);
        }
    };
    match rows {
        None => (0..mu.nrows()).for_each(&mut fill),
        Some(rows) => rows.iter().copied().for_each(&mut fill),
    }
    (dmu, dls)
}

/// All `m` edges of `g` as positives plus `m` uniformly drawn non-edges.
pub fn negative_sampling_pairs<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> Result<PairSet> {
    let n = g.num_nodes();
    let m = g.num_edges();
    if m == 0 {
        return Err(Error::InvalidArgument("negative sampling needs at least one edge".into()));
    }
    if m == n * (n - 1) / 2 {
        return Err(Error::InvalidArgument("negative sampling needs at least one non-edge".into()));
    }
    let mut pairs: Vec<(usize, usize)> = g.edges().collect();
    let mut taken = HashSet::new();
    let negatives = sample_non_edges(g, m, &mut taken, rng)?;
    pairs.extend(negatives);
    let mut labels = vec![true; m];
    labels.resize(2 * m, false);
    Ok(PairSet::List { pairs, labels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn decoder_examples() {
        let z = array![[0.0, 1.0], [1.0, 0.0], [1.0, 0.0]];
        assert_abs_diff_eq!(decode_pair(z.view(), 0, 1), 0.5);
        assert_abs_diff_eq!(decode_pair(z.view(), 1, 2), 0.731_058_578_630_004_9, epsilon = 1e-12);
        assert_eq!(decode_pair(z.view(), 0, 2), decode_pair(z.view(), 2, 0));
    }

    #[test]
    fn half_probabilities_give_ln2() {
        let g = Graph::from_edges(3, &[(0, 1)]).unwrap();
        let z = Array2::zeros((3, 4));
        let cfg = LossConfig {
            pos_weight: PosWeight::Fixed(1.0),
            ..Default::default()
        };
        let block = PairSet::Block(vec![0, 1, 2]);
        assert_abs_diff_eq!(reconstruction_loss(z.view(), &g, &block, &cfg).unwrap(), 2f64.ln(), epsilon = 1e-15);
        let list = PairSet::List {
            pairs: vec![(0, 1), (1, 2)],
            labels: vec![true, false],
        };
        assert_abs_diff_eq!(reconstruction_loss(z.view(), &g, &list, &cfg).unwrap(), 2f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn confident_correct_predictions_have_near_zero_loss() {
        // two orthogonal clusters: {0, 1} and {2}
        let g = Graph::from_edges(3, &[(0, 1)]).unwrap();
        let big = 40.0;
        let z = array![[big, 0.0], [big, 0.0], [0.0, big]];
        let cfg = LossConfig::default();
        let loss = reconstruction_loss(z.view(), &g, &PairSet::Block(vec![0, 1, 2]), &cfg).unwrap();
        // off-block pairs sit at σ(0) = 0.5, so use a list of the confident ones
        assert!(loss > 0.0);
        let list = PairSet::List {
            pairs: vec![(0, 1), (0, 0), (2, 2)],
            labels: vec![true, true, true],
        };
        let l = reconstruction_loss(z.view(), &g, &list, &cfg).unwrap();
        assert!(l < 1e-6, "loss {l}");
        // clipping keeps the loss finite for confident wrong predictions
        let wrong = PairSet::List {
            pairs: vec![(0, 1), (0, 2)],
            labels: vec![false, false],
        };
        let unit = LossConfig {
            pos_weight: PosWeight::Fixed(1.0),
            ..cfg
        };
        let l = reconstruction_loss(z.view(), &g, &wrong, &unit).unwrap();
        assert!(l.is_finite());
        assert_abs_diff_eq!(l, -(1e-7f64).ln() / 2.0 + 2f64.ln() / 2.0, epsilon = 1e-6);
    }

    #[test]
    fn full_block_equals_explicit_list() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let z = Array2::from_shape_fn((4, 2), |(i, k)| (i as f64 - 1.5) * 0.3 + k as f64 * 0.2);
        let cfg = LossConfig::default();
        let mut pairs = Vec::new();
        let mut labels = Vec::new();
        for i in 0..4 {
            for j in 0..4 {
                pairs.push((i, j));
                labels.push(i == j || g.has_edge(i, j));
            }
        }
        let list = PairSet::List { pairs, labels };
        let block = PairSet::Block(vec![0, 1, 2, 3]);
        let (lb, gb) = reconstruction_loss_and_grad(z.view(), &g, &block, &cfg).unwrap();
        let (ll, gl) = reconstruction_loss_and_grad(z.view(), &g, &list, &cfg).unwrap();
        assert_abs_diff_eq!(lb, ll, epsilon = 1e-14);
        for (a, b) in gb.iter().zip(gl.iter()) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-14);
        }
    }

    #[test]
    fn unsampled_rows_get_no_gradient() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (3, 4)]).unwrap();
        let z = Array2::from_shape_fn((5, 3), |(i, k)| ((i * 3 + k) % 5) as f64 * 0.1);
        let (_, dz) = reconstruction_loss_and_grad(z.view(), &g, &PairSet::Block(vec![0, 2, 3]), &LossConfig::default()).unwrap();
        assert!(dz.row(1).iter().all(|v| *v == 0.0));
        assert!(dz.row(4).iter().all(|v| *v == 0.0));
        assert!(dz.row(0).iter().any(|v| *v != 0.0));
    }

    #[test]
    fn error_paths() {
        let g = Graph::from_edges(2, &[]).unwrap();
        let z = Array2::zeros((2, 2));
        let cfg = LossConfig::default();
        assert!(matches!(
            reconstruction_loss(z.view(), &g, &PairSet::Block(vec![]), &cfg),
            Err(Error::EmptyPairSet)
        ));
        let negatives_only = PairSet::List {
            pairs: vec![(0, 1)],
            labels: vec![false],
        };
        assert!(matches!(
            reconstruction_loss(z.view(), &g, &negatives_only, &cfg),
            Err(Error::NoPositives)
        ));
        assert!(LossConfig { clip_epsilon: 0.5, ..cfg }.validate().is_err());
    }

    #[test]
    fn kl_examples() {
        let zeros = Array2::<f64>::zeros((3, 2));
        assert_eq!(kl_divergence(zeros.view(), zeros.view()), 0.0);
        let mu = array![[1.0]];
        let ls = array![[0.0]];
        assert_abs_diff_eq!(kl_divergence(mu.view(), ls.view()), 0.5, epsilon = 1e-15);
        let mu = array![[0.3, -2.0], [0.0, 1.5]];
        let ls = array![[-1.0, 0.7], [2.0, -0.2]];
        assert!(kl_divergence(mu.view(), ls.view()) >= 0.0);
    }

    #[test]
    fn negative_sampling() {
        let g = Graph::from_edges(20, &(0..19).map(|i| (i, i + 1)).collect::<Vec<_>>()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        match negative_sampling_pairs(&g, &mut rng).unwrap() {
            PairSet::List { pairs, labels } => {
                assert_eq!(pairs.len(), 2 * g.num_edges());
                for (&(i, j), &y) in pairs.iter().zip(&labels) {
                    assert_eq!(g.has_edge(i, j), y);
                    assert_ne!(i, j);
                }
            }
            other => panic!("unexpected {other:?}"),
        }
        let k4 = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert!(negative_sampling_pairs(&k4, &mut rng).is_err());
        assert!(negative_sampling_pairs(&Graph::from_edges(3, &[]).unwrap(), &mut rng).is_err());
    }
}
