//! Node importance distributions, subgraph sampling, the `C * sqrt(n)`
//! threshold subgraph size, and exact inclusion probabilities.

mod distribution;
mod inclusion;
mod sample;
mod threshold;

pub use distribution::{build_distribution, ImportanceDistribution, ImportanceMeasure};
pub use inclusion::{
    expected_fastgae_loss, fastgae_loss, inclusion_prob_exact, inclusion_prob_with_replacement,
    inclusion_matrix, node_level_loss, ENUMERATION_MAX_N, ENUMERATION_MAX_NS,
};
pub use sample::{sample_nodes, SubgraphSample};
pub use threshold::{threshold_constant, threshold_subgraph_size, LossKind, ThresholdParams};
