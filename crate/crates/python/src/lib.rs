//! Python bindings: graph loading and statistics, the threshold size, SBM
//! generation, training, and the evaluation metrics.

use fastgae::cli::graph_stats;
use fastgae::eval::{self, ScoredPairs};
use fastgae::graph::{self, split_edges};
use fastgae::model::{self, AdamConfig};
use fastgae::sampler::{threshold_subgraph_size, LossKind};
use fastgae::synth::{self, SbmSpec};
use fastgae::{ImportanceMeasure, ModelKind, NodeFeatures, Strategy, ThresholdParams, TrainConfig};
use ndarray::Array2;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn py_err(e: fastgae::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rows(a: &Array2<f64>) -> Vec<Vec<f64>> {
    a.outer_iter().map(|r| r.to_vec()).collect()
}

fn matrix(data: Vec<Vec<f64>>) -> PyResult<Array2<f64>> {
    let cols = data.first().map_or(0, Vec::len);
    if data.iter().any(|r| r.len() != cols) {
        return Err(PyValueError::new_err("rows must all have the same length"));
    }
    let n = data.len();
    Array2::from_shape_vec((n, cols), data.into_iter().flatten().collect())
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Undirected simple graph in compressed sparse row form.
#[pyclass(name = "Graph")]
pub struct PyGraph {
    inner: fastgae::Graph,
}

#[pymethods]
impl PyGraph {
    #[new]
    fn new(num_nodes: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        let inner = fastgae::Graph::from_edges(num_nodes, &edges).map_err(py_err)?;
        Ok(Self { inner })
    }

    /// Reads a whitespace-separated edge list.
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(Self {
            inner: graph::load_edge_list(path).map_err(py_err)?,
        })
    }

    #[getter]
    fn num_nodes(&self) -> usize {
        self.inner.num_nodes()
    }

    #[getter]
    fn num_edges(&self) -> usize {
        self.inner.num_edges()
    }

    /// Original ids of the nodes, in compact order.
    fn node_ids(&self) -> Vec<u64> {
        self.inner.node_ids().to_vec()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().collect()
    }

    fn degrees(&self) -> Vec<usize> {
        graph::degrees(&self.inner)
    }

    fn core_numbers(&self) -> Vec<usize> {
        graph::core_numbers(&self.inner)
    }

    /// `(n, m, min_degree, max_degree, mean_degree, max_core)`.
    fn stats(&self) -> (usize, usize, usize, usize, f64, usize) {
        let s = graph_stats(&self.inner);
        (s.n, s.m, s.min_degree, s.max_degree, s.mean_degree, s.max_core)
    }

    fn __repr__(&self) -> String {
        format!("Graph(num_nodes={}, num_edges={})", self.inner.num_nodes(), self.inner.num_edges())
    }
}

/// Outcome of a training run.
#[pyclass(get_all)]
pub struct TrainResult {
    pub embeddings: Vec<Vec<f64>>,
    pub loss_history: Vec<f64>,
    pub n_s_used: Option<usize>,
    pub sample_seconds: f64,
    pub train_seconds: f64,
    /// Test AUC and AP; set by `link_prediction` only.
    pub auc: Option<f64>,
    pub ap: Option<f64>,
}

#[allow(clippy::too_many_arguments)]
fn train_config(
    model: &str,
    sampler: &str,
    alpha: f64,
    subgraph_size: Option<usize>,
    with_replacement: bool,
    iterations: usize,
    dim: usize,
    hidden: usize,
    lr: f64,
    seed: u64,
    n: usize,
) -> PyResult<TrainConfig> {
    let kind = match model {
        "gae" => ModelKind::Ae,
        "vgae" => ModelKind::Vae,
        other => return Err(PyValueError::new_err(format!("unknown model '{other}' (gae or vgae)"))),
    };
    let measure = match sampler {
        "uniform" => Some(ImportanceMeasure::Uniform),
        "degree" => Some(ImportanceMeasure::Degree),
        "core" => Some(ImportanceMeasure::Core),
        "none" | "negative" => None,
        other => return Err(PyValueError::new_err(format!("unknown sampler '{other}'"))),
    };
    let strategy = match (sampler, measure) {
        ("none", _) => Strategy::FullDecode,
        ("negative", _) => Strategy::NegativeSampling,
        (_, Some(measure)) => Strategy::FastGae {
            measure,
            alpha,
            subgraph_size: subgraph_size.unwrap_or_else(|| threshold_subgraph_size(n, &ThresholdParams::default())),
            with_replacement,
        },
        _ => unreachable!(),
    };
    Ok(TrainConfig {
        kind,
        strategy,
        iterations,
        hidden,
        dim,
        adam: AdamConfig {
            lr,
            ..AdamConfig::default()
        },
        seed,
        ..TrainConfig::default()
    })
}

fn result(out: model::TrainOutput, scores: Option<&ScoredPairs>) -> TrainResult {
    TrainResult {
        embeddings: rows(&out.embeddings),
        loss_history: out.loss_history,
        n_s_used: out.n_s_used,
        sample_seconds: out.sample_seconds,
        train_seconds: out.train_seconds,
        auc: scores.map(eval::auc),
        ap: scores.map(eval::average_precision),
    }
}

/// Trains on the whole graph with identity features. `subgraph_size=None`
/// uses the threshold size.
#[pyfunction]
#[pyo3(signature = (graph, model="gae", sampler="degree", alpha=1.0, subgraph_size=None, with_replacement=false,
    iterations=200, dim=16, hidden=32, lr=0.01, seed=0))]
#[allow(clippy::too_many_arguments)]
fn train(
    py: Python<'_>,
    graph: &PyGraph,
    model: &str,
    sampler: &str,
    alpha: f64,
    subgraph_size: Option<usize>,
    with_replacement: bool,
    iterations: usize,
    dim: usize,
    hidden: usize,
    lr: f64,
    seed: u64,
) -> PyResult<TrainResult> {
    let n = graph.inner.num_nodes();
    let cfg = train_config(model, sampler, alpha, subgraph_size, with_replacement, iterations, dim, hidden, lr, seed, n)?;
    let g = graph.inner.clone();
    let out = py
        .detach(move || model::train(&g, &NodeFeatures::Identity { n }, &cfg))
        .map_err(py_err)?;
    Ok(result(out, None))
}

/// Masks `test_frac` of the edges (and `val_frac` for validation), trains on
/// the rest and scores the held-out test pairs.
#[pyfunction]
#[pyo3(signature = (graph, model="gae", sampler="degree", alpha=1.0, subgraph_size=None, with_replacement=false,
    iterations=200, dim=16, hidden=32, lr=0.01, seed=0, val_frac=0.05, test_frac=0.1))]
#[allow(clippy::too_many_arguments)]
fn link_prediction(
    py: Python<'_>,
    graph: &PyGraph,
    model: &str,
    sampler: &str,
    alpha: f64,
    subgraph_size: Option<usize>,
    with_replacement: bool,
    iterations: usize,
    dim: usize,
    hidden: usize,
    lr: f64,
    seed: u64,
    val_frac: f64,
    test_frac: f64,
) -> PyResult<TrainResult> {
    let n = graph.inner.num_nodes();
    let cfg = train_config(model, sampler, alpha, subgraph_size, with_replacement, iterations, dim, hidden, lr, seed, n)?;
    let g = graph.inner.clone();
    let (out, scores) = py
        .detach(move || -> fastgae::Result<_> {
            let split = split_edges(&g, val_frac, test_frac, seed)?;
            let out = model::train(&split.train_graph, &NodeFeatures::Identity { n }, &cfg)?;
            let scores = eval::score_pairs(out.embeddings.view(), &split.test_pos, &split.test_neg)?;
            Ok((out, scores))
        })
        .map_err(py_err)?;
    Ok(result(out, Some(&scores)))
}

/// Threshold subgraph size `round(C sqrt(n))`, capped at `n`.
#[pyfunction(name = "threshold_subgraph_size")]
#[pyo3(signature = (n, gamma=1.0, confidence=0.1, epsilon=0.001, loss="cross_entropy"))]
fn threshold(n: usize, gamma: f64, confidence: f64, epsilon: f64, loss: &str) -> PyResult<usize> {
    let loss_kind = match loss {
        "cross_entropy" => LossKind::CrossEntropy,
        "frobenius" => LossKind::Frobenius,
        other => return Err(PyValueError::new_err(format!("unknown loss '{other}'"))),
    };
    let params = ThresholdParams {
        gamma,
        confidence_alpha: confidence,
        epsilon,
        loss_kind,
    };
    params.validate().map_err(py_err)?;
    Ok(threshold_subgraph_size(n, &params))
}

/// Stochastic block model; returns the graph and the block labels.
#[pyfunction]
#[pyo3(signature = (num_communities, community_size, p_in, p_out, seed=0))]
fn generate_sbm(
    num_communities: usize,
    community_size: usize,
    p_in: f64,
    p_out: f64,
    seed: u64,
) -> PyResult<(PyGraph, Vec<usize>)> {
    let (g, labels) = synth::generate_sbm(&SbmSpec {
        num_communities,
        community_size,
        p_in,
        p_out,
        seed,
    })
    .map_err(py_err)?;
    Ok((PyGraph { inner: g }, labels))
}

#[pyfunction]
fn auc(pos: Vec<f64>, neg: Vec<f64>) -> PyResult<f64> {
    Ok(eval::auc(&ScoredPairs::new(pos, neg).map_err(py_err)?))
}

#[pyfunction]
fn average_precision(pos: Vec<f64>, neg: Vec<f64>) -> PyResult<f64> {
    Ok(eval::average_precision(&ScoredPairs::new(pos, neg).map_err(py_err)?))
}

#[pyfunction]
fn adjusted_mutual_information(pred: Vec<usize>, truth: Vec<usize>) -> PyResult<f64> {
    eval::adjusted_mutual_information(&pred, &truth).map_err(py_err)
}

/// k-means++ then Lloyd; returns `(assignments, inertia)`.
#[pyfunction]
#[pyo3(signature = (points, k, seed=0, max_iters=300, restarts=10))]
fn kmeans(points: Vec<Vec<f64>>, k: usize, seed: u64, max_iters: usize, restarts: usize) -> PyResult<(Vec<usize>, f64)> {
    let z = matrix(points)?;
    let c = eval::kmeans_restarts(z.view(), k, seed, max_iters, restarts.max(1)).map_err(py_err)?;
    Ok((c.assignments, c.inertia))
}

#[pymodule]
fn fastgae_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<TrainResult>()?;
    m.add_function(wrap_pyfunction!(train, m)?)?;
    m.add_function(wrap_pyfunction!(link_prediction, m)?)?;
    m.add_function(wrap_pyfunction!(threshold, m)?)?;
    m.add_function(wrap_pyfunction!(generate_sbm, m)?)?;
    m.add_function(wrap_pyfunction!(auc, m)?)?;
    m.add_function(wrap_pyfunction!(average_precision, m)?)?;
    m.add_function(wrap_pyfunction!(adjusted_mutual_information, m)?)?;
    m.add_function(wrap_pyfunction!(kmeans, m)?)?;
    Ok(())
}
