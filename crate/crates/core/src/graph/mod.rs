//! Undirected simple graphs in CSR form, plus everything derived from the
//! structure alone: normalized adjacency, degrees, core numbers and
//! train/validation/test edge splits.

mod io;
mod kcore;
mod normalize;
pub(crate) mod split;

pub use io::{load_edge_list, load_features, load_labels, parse_edge_list, write_edge_list};
pub use kcore::core_numbers;
pub use normalize::{normalize_adjacency, NormalizedAdjacency};
pub use split::{split_edges, EdgeSplit};

use ndarray::Array2;

use crate::error::{Error, Result};

/// Immutable undirected simple graph.
///
/// Each undirected edge is stored in both rows, column indices within a row
/// are strictly increasing, and there are no self-loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    node_ids: Vec<u64>,
}

impl Graph {
    /// Builds a graph on nodes `0..n` from an arbitrary edge list.
    ///
    /// Self-loops, duplicates and reversed duplicates are dropped. Node ids
    /// default to the compact indices.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::from_edges_with_ids(edges, (0..n as u64).collect())
    }

    pub(crate) fn from_edges_with_ids(edges: &[(usize, usize)], node_ids: Vec<u64>) -> Result<Self> {
        let n = node_ids.len();
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut counts = vec![0usize; n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidArgument(format!(
                    "edge ({u}, {v}) references a node outside 0..{n}"
                )));
            }
            if u != v {
                counts[u] += 1;
                counts[v] += 1;
            }
        }
        let mut row_offsets = Vec::with_capacity(n + 1);
        row_offsets.push(0);
        for c in &counts {
            row_offsets.push(row_offsets.last().unwrap() + c);
        }
        let mut cursor = row_offsets[..n].to_vec();
        let mut cols = vec![0usize; row_offsets[n]];
        for &(u, v) in edges {
            if u != v {
                cols[cursor[u]] = v;
                cursor[u] += 1;
                cols[cursor[v]] = u;
                cursor[v] += 1;
            }
        }

        // sort and dedupe each row, then compact
        let mut col_indices = Vec::with_capacity(cols.len());
        let mut compact_offsets = Vec::with_capacity(n + 1);
        compact_offsets.push(0);
        for i in 0..n {
            let row = &mut cols[row_offsets[i]..row_offsets[i + 1]];
            row.sort_unstable();
            let mut last = None;
            for &c in row.iter() {
                if last != Some(c) {
                    col_indices.push(c);
                    last = Some(c);
                }
            }
            compact_offsets.push(col_indices.len());
        }

        Ok(Self {
            row_offsets: compact_offsets,
            col_indices,
            node_ids,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.node_ids.len()
    }

    /// Number of undirected edges.
    pub fn num_edges(&self) -> usize {
        self.col_indices.len() / 2
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    /// Original id of each compact node.
    pub fn node_ids(&self) -> &[u64] {
        &self.node_ids
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.col_indices[self.row_offsets[i]..self.row_offsets[i + 1]]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.row_offsets[i + 1] - self.row_offsets[i]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.neighbors(i).binary_search(&j).is_ok()
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, in row order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.num_nodes()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    /// Same node set and ids, different edges.
    pub(crate) fn with_edges(&self, edges: &[(usize, usize)]) -> Result<Self> {
        Self::from_edges_with_ids(edges, self.node_ids.clone())
    }
}

/// Node degrees `d_i = sum_j A_ij`.
pub fn degrees(g: &Graph) -> Vec<usize> {
    (0..g.num_nodes()).map(|i| g.degree(i)).collect()
}

/// Node feature matrix `X`.
#[derive(Debug, Clone, PartialEq)]
pub enum NodeFeatures {
    /// Featureless graph, `X = I_n`.
    Identity { n: usize },
    /// Dense `n x f` matrix.
    Dense(Array2<f64>),
}

impl NodeFeatures {
    pub fn num_rows(&self) -> usize {
        match self {
            NodeFeatures::Identity { n } => *n,
            NodeFeatures::Dense(x) => x.nrows(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            NodeFeatures::Identity { n } => *n,
            NodeFeatures::Dense(x) => x.ncols(),
        }
    }

    pub fn check_nodes(&self, n: usize) -> Result<()> {
        if self.num_rows() != n {
            return Err(Error::DimensionMismatch(format!(
                "features have {} rows but the graph has {n} nodes",
                self.num_rows()
            )));
        }
        Ok(())
    }
}
