//! Link prediction and clustering metrics.

mod ami;
mod kmeans;
mod metrics;

pub use ami::{adjusted_mutual_information, mutual_information};
pub use kmeans::{kmeans, kmeans_restarts, Clustering};
pub use metrics::{auc, average_precision, score_pairs, ScoredPairs};
