//! Graph autoencoders (AE) and variational graph autoencoders (VAE) trained
//! with stochastic subgraph decoding.
//!
//! Every training iteration encodes all nodes with a two-layer GCN, then
//! reconstructs only the adjacency block of a node subset drawn from an
//! importance distribution (uniform, degree or core number). With the
//! subset size set to `C * sqrt(n)` an iteration costs `O(m + n)`.
//!
//! Module map:
//! - [`graph`]: CSR graph, edge-list loading, normalization, degrees, k-cores, splits
//! - [`sampler`]: importance distributions, subgraph sampling, threshold size,
//!   exact inclusion probabilities
//! - [`model`]: GCN encoder, inner-product decoder, losses, gradients, Adam, training
//! - [`eval`]: AUC, average precision, k-means, adjusted mutual information
//! - [`synth`]: stochastic block model generator
//! - [`cli`]: command-line front end

pub mod cli;
pub mod error;
pub mod eval;
pub mod graph;
pub mod model;
pub mod sampler;
pub mod synth;

pub use error::{Error, Result};
pub use graph::{EdgeSplit, Graph, NodeFeatures, NormalizedAdjacency};
pub use model::{GcnModel, ModelKind, Strategy, TrainConfig, TrainOutput};
pub use sampler::{ImportanceDistribution, ImportanceMeasure, SubgraphSample, ThresholdParams};
