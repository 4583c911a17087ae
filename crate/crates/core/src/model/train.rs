use std::time::Instant;

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::adam::{AdamConfig, AdamState};
use super::backward::backward;
use super::encoder::{embed, encode};
use super::loss::{negative_sampling_pairs, LossConfig, PairSet};
use super::{init_glorot, GcnModel, ModelKind};
use crate::error::{Error, Result};
use crate::graph::{normalize_adjacency, Graph, NodeFeatures};
use crate::sampler::{build_distribution, sample_nodes, ImportanceMeasure};

/// Which node pairs are decoded at each iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Strategy {
    /// All `n²` pairs.
    FullDecode,
    /// All pairs of a fresh node sample drawn from an importance distribution.
    FastGae {
        measure: ImportanceMeasure,
        alpha: f64,
        subgraph_size: usize,
        with_replacement: bool,
    },
    /// All edges plus as many random non-edges.
    NegativeSampling,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub kind: ModelKind,
    pub strategy: Strategy,
    pub iterations: usize,
    pub hidden: usize,
    pub dim: usize,
    pub adam: AdamConfig,
    pub dropout: f64,
    pub loss: LossConfig,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            kind: ModelKind::Ae,
            strategy: Strategy::FullDecode,
            iterations: 200,
            hidden: 32,
            dim: 16,
            adam: AdamConfig::default(),
            dropout: 0.0,
            loss: LossConfig::default(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutput {
    pub model: GcnModel,
    /// Inference embeddings (posterior means for the VAE).
    pub embeddings: Array2<f64>,
    /// Objective value at every iteration, before the update.
    pub loss_history: Vec<f64>,
    /// Time spent building the sampling distribution.
    pub sample_seconds: f64,
    /// Time spent in the training loop.
    pub train_seconds: f64,
    /// Subgraph size for the sampling strategies, `n` for full decoding.
    pub n_s_used: Option<usize>,
}

// independent RNG streams derived from the seed
const NOISE_STREAM: u64 = 1;
const SAMPLE_STREAM: u64 = 2;

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Trains a GCN autoencoder on `g`.
///
/// Every iteration runs the encoder on all nodes, decodes the pair set chosen
/// by the strategy, backpropagates and takes one Adam step. Weight
/// initialization, encoder noise and pair sampling use separate streams of
/// the same seed, so runs are bit-reproducible and full decoding matches
/// sampling with `n_S = n` exactly.
pub fn train(g: &Graph, x: &NodeFeatures, config: &TrainConfig) -> Result<TrainOutput> {
    let n = g.num_nodes();
    x.check_nodes(n)?;
    config.loss.validate()?;
    if !(0.0..1.0).contains(&config.dropout) {
        return Err(Error::InvalidArgument(format!("dropout must lie in [0, 1) (got {})", config.dropout)));
    }
    if config.hidden == 0 || config.dim == 0 {
        return Err(Error::InvalidArgument("hidden and embedding dimensions must be >= 1".into()));
    }

    let mut model = init_glorot(x.dim(), config.hidden, config.dim, config.kind, config.seed);
    let a_norm = normalize_adjacency(g);

    let dist_timer = Instant::now();
    let dist = match config.strategy {
        Strategy::FastGae {
            measure,
            alpha,
            subgraph_size,
            with_replacement,
        } => {
            if subgraph_size == 0 || subgraph_size > n {
                return Err(Error::InvalidArgument(format!(
                    "subgraph size must lie in 1..={n} (got {subgraph_size})"
                )));
            }
            let dist = build_distribution(g, measure, alpha)?;
            if !with_replacement && subgraph_size > dist.support_size() {
                return Err(Error::NotEnoughNodes {
                    requested: subgraph_size,
                    available: dist.support_size(),
                });
            }
            Some(dist)
        }
        _ => None,
    };
    let sample_seconds = dist_timer.elapsed().as_secs_f64();

    let mut noise_rng = stream(config.seed, NOISE_STREAM);
    let mut sample_rng = stream(config.seed, SAMPLE_STREAM);
    let mut adam = AdamState::new(&model, config.adam);
    let full_block = PairSet::Block((0..n).collect());
    let mut loss_history = Vec::with_capacity(config.iterations);

    let timer = Instant::now();
    for _ in 0..config.iterations {
        let cache = encode(&model, &a_norm, x, config.dropout, &mut noise_rng)?;
        let sampled;
        let pairs = match (&config.strategy, &dist) {
            (Strategy::FullDecode, _) => &full_block,
            (
                Strategy::FastGae {
                    subgraph_size,
                    with_replacement,
                    ..
                },
                Some(dist),
            ) => {
                let s = sample_nodes(g, dist, *subgraph_size, *with_replacement, &mut sample_rng)?;
                sampled = PairSet::Block(s.distinct_sorted());
                &sampled
            }
            (Strategy::NegativeSampling, _) => {
                sampled = negative_sampling_pairs(g, &mut sample_rng)?;
                &sampled
            }
            (Strategy::FastGae { .. }, None) => unreachable!("distribution built above"),
        };
        let (loss, grads) = backward(&model, &cache, &a_norm, x, g, pairs, &config.loss)?;
        loss_history.push(loss.total);
        adam.step(&mut model, &grads)?;
    }
    let embeddings = embed(&model, &a_norm, x)?;
    let train_seconds = timer.elapsed().as_secs_f64();

    let n_s_used = match config.strategy {
        Strategy::FullDecode => Some(n),
        Strategy::FastGae { subgraph_size, .. } => Some(subgraph_size),
        Strategy::NegativeSampling => None,
    };
    Ok(TrainOutput {
        model,
        embeddings,
        loss_history,
        sample_seconds,
        train_seconds,
        n_s_used,
    })
}
