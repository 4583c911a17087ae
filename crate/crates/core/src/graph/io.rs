use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use ndarray::Array2;

use super::{Graph, NodeFeatures};
use crate::error::{Error, Result};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn is_comment(line: &str) -> bool {
    line.starts_with('#') || line.starts_with('%')
}

/// Reads a whitespace-separated edge list.
///
/// Lines starting with `#` or `%` and blank lines are skipped. Only the first
/// two columns are read. Ids are remapped to `0..n` in first-appearance order.
pub fn load_edge_list(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    parse_edge_list(&read(path)?, path)
}

/// Parses edge-list text; `origin` is only used in error messages.
pub fn parse_edge_list(text: &str, origin: &Path) -> Result<Graph> {
    let mut index: HashMap<u64, usize> = HashMap::new();
    let mut node_ids = Vec::new();
    let mut edges = Vec::new();
    let mut intern = |id: u64| {
        *index.entry(id).or_insert_with(|| {
            node_ids.push(id);
            node_ids.len() - 1
        })
    };
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || is_comment(line) {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let mut next_id = || -> Result<u64> {
            let tok = tokens.next().ok_or_else(|| Error::Parse {
                path: origin.to_path_buf(),
                line: lineno + 1,
                message: "expected two node ids".into(),
            })?;
            tok.parse::<u64>().map_err(|_| Error::Parse {
                path: origin.to_path_buf(),
                line: lineno + 1,
                message: format!("'{tok}' is not a non-negative integer"),
            })
        };
        let u = next_id()?;
        let v = next_id()?;
        let (u, v) = (intern(u), intern(v));
        edges.push((u, v));
    }
    if node_ids.is_empty() {
        return Err(Error::EmptyGraph);
    }
    Graph::from_edges_with_ids(&edges, node_ids)
}

/// Writes each undirected edge once as `id_u id_v`, using original ids.
pub fn write_edge_list(g: &Graph, mut out: impl Write) -> std::io::Result<()> {
    let ids = g.node_ids();
    for (u, v) in g.edges() {
        writeln!(out, "{} {}", ids[u], ids[v])?;
    }
    Ok(())
}

/// Dense features from a headerless CSV, one row per compact node.
pub fn load_features(path: impl AsRef<Path>, n: usize) -> Result<NodeFeatures> {
    let path = path.as_ref();
    let text = read(path)?;
    let mut data = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line: lineno + 1,
            message,
        };
        let before = data.len();
        for tok in line.split(',') {
            let tok = tok.trim();
            let v: f64 = tok
                .parse()
                .map_err(|_| parse_err(format!("'{tok}' is not a number")))?;
            if !v.is_finite() {
                return Err(parse_err(format!("non-finite value '{tok}'")));
            }
            data.push(v);
        }
        let width = data.len() - before;
        match cols {
            None => cols = Some(width),
            Some(c) if c != width => {
                return Err(parse_err(format!("expected {c} columns, found {width}")));
            }
            _ => {}
        }
        rows += 1;
    }
    let cols = cols.unwrap_or(0);
    if rows != n {
        return Err(Error::DimensionMismatch(format!(
            "{} has {rows} feature rows but the graph has {n} nodes",
            path.display()
        )));
    }
    let x = Array2::from_shape_vec((rows, cols), data)
        .map_err(|e| Error::DimensionMismatch(e.to_string()))?;
    Ok(NodeFeatures::Dense(x))
}

/// Ground-truth labels, one integer per line; line `i` labels compact node `i`.
pub fn load_labels(path: impl AsRef<Path>, n: usize) -> Result<Vec<usize>> {
    let path = path.as_ref();
    let text = read(path)?;
    let mut labels = Vec::with_capacity(n);
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        labels.push(line.parse::<usize>().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line: lineno + 1,
            message: format!("'{line}' is not a non-negative integer label"),
        })?);
    }
    if labels.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} has {} labels but the graph has {n} nodes",
            path.display(),
            labels.len()
        )));
    }
    Ok(labels)
}
