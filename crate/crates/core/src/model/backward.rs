use ndarray::Array2;

use super::encoder::{forward, ForwardCache};
use super::loss::{kl_grad, kl_sum, reconstruction_loss_and_grad, LossConfig, PairSet};
use super::{GcnModel, ModelGrads, ModelKind};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeFeatures, NormalizedAdjacency};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossBreakdown {
    pub total: f64,
    pub reconstruction: f64,
    /// KL term as added to the objective (zero for the AE).
    pub kl: f64,
}

/// Objective value and exact gradients for every weight matrix.
///
/// The VAE objective is `reconstruction + KL_sum / k²`, where the KL sum runs
/// over all `n` nodes (`k = n`) or only the decoded nodes (`k = n_S`), so both
/// terms are on a per-pair scale.
pub fn backward(
    model: &GcnModel,
    cache: &ForwardCache,
    a_norm: &NormalizedAdjacency,
    x: &NodeFeatures,
    graph: &Graph,
    pairs: &PairSet,
    config: &LossConfig,
) -> Result<(LossBreakdown, ModelGrads)> {
    let n = a_norm.num_nodes();
    if cache.z.nrows() != n || graph.num_nodes() != n {
        return Err(Error::DimensionMismatch(format!(
            "cache has {} rows, adjacency {n}, graph {}",
            cache.z.nrows(),
            graph.num_nodes()
        )));
    }
    let (reconstruction, dz) = reconstruction_loss_and_grad(cache.z.view(), graph, pairs, config)?;

    let mut kl = 0.0;
    let (d_mu, d_ls) = match (model.kind, &cache.log_sigma) {
        (ModelKind::Ae, _) => (dz, None),
        (ModelKind::Vae, Some(ls)) => {
            let sampled;
            let (rows, k) = if config.kl_on_all_nodes {
                (None, n)
            } else {
                sampled = pairs.nodes();
                let k = sampled.len();
                (Some(sampled.as_slice()), k)
            };
            let scale = 1.0 / (k * k) as f64;
            kl = scale * kl_sum(cache.mu.view(), ls.view(), rows);
            let (kl_mu, kl_ls) = kl_grad(cache.mu.view(), ls.view(), rows, scale);
            // through z = mu + exp(ls) ⊙ noise
            let mut d_ls = match &cache.noise {
                Some(noise) => &dz * &ls.mapv(f64::exp) * noise,
                None => Array2::zeros(ls.raw_dim()),
            };
            d_ls += &kl_ls;
            (dz + kl_mu, Some(d_ls))
        }
        (ModelKind::Vae, None) => {
            return Err(Error::DimensionMismatch("VAE cache is missing log_sigma".into()));
        }
    };

    let w_mu = cache.ah1.t().dot(&d_mu);
    let mut d_ah1 = d_mu.dot(&model.w_mu.t());
    let w_sigma = match (&d_ls, &model.w_sigma) {
        (Some(d_ls), Some(ws)) => {
            d_ah1 += &d_ls.dot(&ws.t());
            Some(cache.ah1.t().dot(d_ls))
        }
        _ => None,
    };

    let mut d_h1 = a_norm.matmul(d_ah1.view())?;
    if let Some(mask) = &cache.dropout_mask {
        d_h1 *= mask;
    }
    d_h1.zip_mut_with(&cache.h1_pre, |g, &pre| {
        if pre <= 0.0 {
            *g = 0.0;
        }
    });
    let d_xw = a_norm.matmul(d_h1.view())?;
    let w0 = match x {
        NodeFeatures::Identity { .. } => d_xw,
        NodeFeatures::Dense(x) => x.t().dot(&d_xw),
    };

    Ok((
        LossBreakdown {
            total: reconstruction + kl,
            reconstruction,
            kl,
        },
        ModelGrads { w0, w_mu, w_sigma },
    ))
}

/// Forward pass with fixed noise and dropout mask, then [`backward`].
#[allow(clippy::too_many_arguments)]
pub fn loss_and_gradients(
    model: &GcnModel,
    a_norm: &NormalizedAdjacency,
    x: &NodeFeatures,
    graph: &Graph,
    pairs: &PairSet,
    config: &LossConfig,
    noise: Option<&Array2<f64>>,
    dropout_mask: Option<&Array2<f64>>,
) -> Result<(LossBreakdown, ModelGrads)> {
    let cache = forward(model, a_norm, x, noise, dropout_mask)?;
    backward(model, &cache, a_norm, x, graph, pairs, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::normalize_adjacency;
    use crate::model::init_glorot;

    #[test]
    fn zero_weights_zero_output_gradient() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let a = normalize_adjacency(&g);
        let x = NodeFeatures::Identity { n: 5 };
        let mut m = init_glorot(5, 4, 3, ModelKind::Ae, 0);
        m.w0.fill(0.0);
        m.w_mu.fill(0.0);
        let pairs = PairSet::Block((0..5).collect());
        let (loss, grads) = loss_and_gradients(&m, &a, &x, &g, &pairs, &LossConfig::default(), None, None).unwrap();
        assert!(grads.w_mu.iter().all(|v| *v == 0.0));
        assert!(loss.total.is_finite());
        assert_eq!(loss.kl, 0.0);
    }

    #[test]
    fn subgraph_gradient_reaches_all_first_layer_rows() {
        // decoding {0, 1} still updates W0 rows of their neighbours through Ã
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]).unwrap();
        let a = normalize_adjacency(&g);
        let x = NodeFeatures::Identity { n: 6 };
        let m = init_glorot(6, 8, 4, ModelKind::Ae, 3);
        let pairs = PairSet::Block(vec![0, 1]);
        let (_, grads) = loss_and_gradients(&m, &a, &x, &g, &pairs, &LossConfig::default(), None, None).unwrap();
        // two hops from {0, 1} reaches node 3, not node 5
        assert!(grads.w0.row(3).iter().any(|v| *v != 0.0));
        assert!(grads.w0.row(5).iter().all(|v| *v == 0.0));
    }
}
