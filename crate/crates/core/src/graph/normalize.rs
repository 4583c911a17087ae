use ndarray::{Array2, ArrayView2};

use super::Graph;
use crate::error::{Error, Result};

/// `D^{-1/2} (A + I) D^{-1/2}` in CSR form, diagonal included.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedAdjacency {
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

/// Symmetric normalization with self-loops; entry `(i, j)` is
/// `1 / sqrt((d_i + 1)(d_j + 1))`. Runs in `O(n + m)`.
pub fn normalize_adjacency(g: &Graph) -> NormalizedAdjacency {
    let n = g.num_nodes();
    let inv_sqrt: Vec<f64> = (0..n)
        .map(|i| 1.0 / ((g.degree(i) + 1) as f64).sqrt())
        .collect();
    let mut row_offsets = Vec::with_capacity(n + 1);
    let mut col_indices = Vec::with_capacity(2 * g.num_edges() + n);
    let mut values = Vec::with_capacity(2 * g.num_edges() + n);
    row_offsets.push(0);
    for i in 0..n {
        let mut diag_done = false;
        for &j in g.neighbors(i) {
            if !diag_done && j > i {
                col_indices.push(i);
                values.push(inv_sqrt[i] * inv_sqrt[i]);
                diag_done = true;
            }
            col_indices.push(j);
            values.push(inv_sqrt[i] * inv_sqrt[j]);
        }
        if !diag_done {
            col_indices.push(i);
            values.push(inv_sqrt[i] * inv_sqrt[i]);
        }
        row_offsets.push(col_indices.len());
    }
    NormalizedAdjacency {
        row_offsets,
        col_indices,
        values,
    }
}

impl NormalizedAdjacency {
    pub fn num_nodes(&self) -> usize {
        self.row_offsets.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `(column, value)` pairs of row `i`, columns increasing.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_offsets[i]..self.row_offsets[i + 1];
        self.col_indices[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let range = self.row_offsets[i]..self.row_offsets[i + 1];
        match self.col_indices[range.clone()].binary_search(&j) {
            Ok(k) => self.values[range.start + k],
            Err(_) => 0.0,
        }
    }

    /// Sparse-dense product `Ã · M` in `O(nnz · cols)`.
    pub fn matmul(&self, m: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        let n = self.num_nodes();
        if m.nrows() != n {
            return Err(Error::DimensionMismatch(format!(
                "normalized adjacency is {n}x{n}, right operand has {} rows",
                m.nrows()
            )));
        }
        let cols = m.ncols();
        let mut out = Array2::<f64>::zeros((n, cols));
        let owned;
        let dense = match m.as_slice() {
            Some(s) => s,
            None => {
                owned = m.as_standard_layout().into_owned();
                owned.as_slice().unwrap()
            }
        };
        let out_slice = out.as_slice_mut().unwrap();
        for i in 0..n {
            let dst = &mut out_slice[i * cols..(i + 1) * cols];
            for k in self.row_offsets[i]..self.row_offsets[i + 1] {
                let j = self.col_indices[k];
                let a = self.values[k];
                let src = &dense[j * cols..(j + 1) * cols];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        Ok(out)
    }

    /// Dense copy, for tests and tiny graphs.
    pub fn to_dense(&self) -> Array2<f64> {
        let n = self.num_nodes();
        let mut out = Array2::zeros((n, n));
        for i in 0..n {
            for (j, v) in self.row(i) {
                out[[i, j]] = v;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn single_edge_is_all_half() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let a = normalize_adjacency(&g).to_dense();
        for v in a.iter() {
            assert_abs_diff_eq!(*v, 0.5, epsilon = 1e-15);
        }
    }

    #[test]
    fn isolated_node_has_unit_diagonal() {
        let g = Graph::from_edges(3, &[(0, 1)]).unwrap();
        let a = normalize_adjacency(&g);
        assert_eq!(a.row(2).collect::<Vec<_>>(), vec![(2, 1.0)]);
    }

    #[test]
    fn triangle_entries_are_one_third() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let a = normalize_adjacency(&g).to_dense();
        for v in a.iter() {
            assert_abs_diff_eq!(*v, 1.0 / 3.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn matmul_matches_dense() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (1, 3)]).unwrap();
        let a = normalize_adjacency(&g);
        let m = array![[1.0, 2.0], [0.5, -1.0], [3.0, 0.0], [-2.0, 1.0]];
        let sparse = a.matmul(m.view()).unwrap();
        let dense = a.to_dense().dot(&m);
        for (x, y) in sparse.iter().zip(dense.iter()) {
            assert_abs_diff_eq!(*x, *y, epsilon = 1e-14);
        }
        // transposed (non-contiguous) operand takes the copy path
        let mt = array![[1.0, 0.5, 3.0, -2.0], [2.0, -1.0, 0.0, 1.0]];
        assert_eq!(a.matmul(mt.t()).unwrap(), sparse);
        assert!(a.matmul(Array2::zeros((3, 2)).view()).is_err());
    }

    #[test]
    fn columns_sorted_with_diagonal() {
        let g = Graph::from_edges(4, &[(2, 0), (2, 3), (2, 1)]).unwrap();
        let a = normalize_adjacency(&g);
        let cols: Vec<usize> = a.row(2).map(|(j, _)| j).collect();
        assert_eq!(cols, vec![0, 1, 2, 3]);
        assert_eq!(a.nnz(), 2 * 3 + 4);
    }
}
