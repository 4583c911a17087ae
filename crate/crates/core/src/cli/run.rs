use std::collections::HashSet;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use log::info;
use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{adjusted_mutual_information, auc, average_precision, kmeans_restarts, score_pairs};
use crate::graph::{load_edge_list, load_features, load_labels, split_edges, Graph, NodeFeatures};
use crate::model::{AdamConfig, Checkpoint, LossConfig, ModelKind, Strategy, TrainConfig, TrainOutput};
use crate::sampler::{threshold_subgraph_size, ImportanceMeasure, LossKind, ThresholdParams};

/// Graphs at least this large train for 300 iterations instead of 200.
pub const LARGE_GRAPH_NODES: usize = 100_000;
const KMEANS_MAX_ITERS: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModelArg {
    Gae,
    Vgae,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SamplerArg {
    /// Decode every pair.
    None,
    Uniform,
    Degree,
    Core,
    /// Edges plus as many random non-edges.
    Negative,
}

impl SamplerArg {
    fn measure(self) -> Option<ImportanceMeasure> {
        match self {
            SamplerArg::Uniform => Some(ImportanceMeasure::Uniform),
            SamplerArg::Degree => Some(ImportanceMeasure::Degree),
            SamplerArg::Core => Some(ImportanceMeasure::Core),
            SamplerArg::None | SamplerArg::Negative => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum TaskArg {
    /// Link prediction on a masked graph.
    Lp,
    /// k-means on embeddings of the complete graph.
    Cluster,
    Both,
}

/// Every setting of a training run after defaults are resolved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub input: PathBuf,
    pub features: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub model: ModelArg,
    pub sampler: SamplerArg,
    pub alpha: f64,
    /// Resolved subgraph size; `None` when the sampler does not draw nodes.
    pub subgraph_size: Option<usize>,
    pub with_replacement: bool,
    pub dim: usize,
    pub hidden: usize,
    pub lr: f64,
    pub iterations: usize,
    pub dropout: f64,
    pub val_frac: f64,
    pub test_frac: f64,
    pub gamma: f64,
    pub confidence: f64,
    pub epsilon: f64,
    pub seed: u64,
    pub task: TaskArg,
    pub clusters: Option<usize>,
    pub kmeans_restarts: usize,
    pub out_dir: PathBuf,
}

impl RunConfig {
    pub fn threshold_params(&self) -> ThresholdParams {
        ThresholdParams {
            gamma: self.gamma,
            confidence_alpha: self.confidence,
            epsilon: self.epsilon,
            loss_kind: LossKind::CrossEntropy,
        }
    }

    pub fn train_config(&self) -> Result<TrainConfig> {
        let strategy = match (self.sampler, self.subgraph_size) {
            (SamplerArg::None, _) => Strategy::FullDecode,
            (SamplerArg::Negative, _) => Strategy::NegativeSampling,
            (s, Some(size)) => Strategy::FastGae {
                measure: s.measure().expect("sampling strategy"),
                alpha: self.alpha,
                subgraph_size: size,
                with_replacement: self.with_replacement,
            },
            (s, None) => {
                return Err(Error::InvalidArgument(format!("sampler {s:?} needs a subgraph size")));
            }
        };
        Ok(TrainConfig {
            kind: match self.model {
                ModelArg::Gae => ModelKind::Ae,
                ModelArg::Vgae => ModelKind::Vae,
            },
            strategy,
            iterations: self.iterations,
            hidden: self.hidden,
            dim: self.dim,
            adam: AdamConfig {
                lr: self.lr,
                ..AdamConfig::default()
            },
            dropout: self.dropout,
            loss: LossConfig::default(),
            seed: self.seed,
        })
    }
}

/// Requested subgraph size before resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubgraphSizeArg {
    Auto,
    Fixed(usize),
}

impl std::str::FromStr for SubgraphSizeArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "auto" {
            return Ok(Self::Auto);
        }
        match s.parse::<usize>() {
            Ok(v) if v > 0 => Ok(Self::Fixed(v)),
            _ => Err(format!("expected a positive integer or 'auto', got '{s}'")),
        }
    }
}

/// Fills in the graph-dependent defaults: iteration count and subgraph size.
pub fn resolve_sizes(
    n: usize,
    sampler: SamplerArg,
    size: SubgraphSizeArg,
    iterations: Option<usize>,
    params: &ThresholdParams,
) -> Result<(Option<usize>, usize)> {
    params.validate()?;
    let iterations = iterations.unwrap_or(if n < LARGE_GRAPH_NODES { 200 } else { 300 });
    let subgraph_size = match (sampler.measure(), size) {
        (None, SubgraphSizeArg::Auto) => None,
        (None, SubgraphSizeArg::Fixed(_)) => {
            return Err(Error::InvalidArgument(format!(
                "--subgraph-size only applies to the uniform, degree and core samplers (got {sampler:?})"
            )));
        }
        (Some(_), SubgraphSizeArg::Auto) => Some(threshold_subgraph_size(n, params)),
        (Some(_), SubgraphSizeArg::Fixed(v)) => Some(v),
    };
    Ok((subgraph_size, iterations))
}

/// Results of one run, serialized as `metrics.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub auc: Option<f64>,
    pub ap: Option<f64>,
    pub val_auc: Option<f64>,
    pub val_ap: Option<f64>,
    pub ami: Option<f64>,
    pub loss_history: Vec<f64>,
    pub train_seconds: f64,
    pub sample_seconds: f64,
    pub n_s_used: Option<usize>,
    pub num_nodes: usize,
    pub num_edges: usize,
    pub config: RunConfig,
}

/// In-memory outcome of [`execute`].
#[derive(Debug, Clone)]
pub struct RunReport {
    pub metrics: Metrics,
    pub graph: Graph,
    /// Training output behind the reported loss history (the link
    /// prediction run when both tasks are requested).
    pub output: TrainOutput,
    pub train_config: TrainConfig,
    pub assignments: Option<Vec<usize>>,
}

fn count_distinct(labels: &[usize]) -> usize {
    labels.iter().collect::<HashSet<_>>().len()
}

fn features_for(config: &RunConfig, n: usize) -> Result<NodeFeatures> {
    match &config.features {
        Some(path) => load_features(path, n),
        None => Ok(NodeFeatures::Identity { n }),
    }
}

/// Test and (optional) validation `(AUC, AP)` of a link prediction run.
type LinkScores = ((f64, f64), Option<(f64, f64)>);

/// Link prediction on the masked training graph.
fn link_prediction(
    g: &Graph,
    x: &NodeFeatures,
    config: &RunConfig,
    tc: &TrainConfig,
) -> Result<(TrainOutput, LinkScores)> {
    let split = split_edges(g, config.val_frac, config.test_frac, config.seed)?;
    if split.test_pos.is_empty() {
        return Err(Error::InvalidArgument("--test-frac leaves no test edges".into()));
    }
    let out = crate::model::train(&split.train_graph, x, tc)?;
    let z = out.embeddings.view();
    let test = score_pairs(z, &split.test_pos, &split.test_neg)?;
    let val = if split.val_pos.is_empty() {
        None
    } else {
        let s = score_pairs(z, &split.val_pos, &split.val_neg)?;
        Some((auc(&s), average_precision(&s)))
    };
    Ok((out, ((auc(&test), average_precision(&test)), val)))
}

/// Runs the configured task(s) without touching the output directory.
pub fn execute(config: &RunConfig) -> Result<RunReport> {
    let g = load_edge_list(&config.input)?;
    let n = g.num_nodes();
    let x = features_for(config, n)?;
    let labels = config.labels.as_ref().map(|p| load_labels(p, n)).transpose()?;
    let tc = config.train_config()?;
    info!("n = {n}, m = {}, strategy {:?}", g.num_edges(), tc.strategy);

    let mut metrics_lp = None;
    let mut lp_output = None;
    if matches!(config.task, TaskArg::Lp | TaskArg::Both) {
        let (out, (test, val)) = link_prediction(&g, &x, config, &tc)?;
        info!("test AUC {:.4}, AP {:.4}", test.0, test.1);
        metrics_lp = Some((test, val));
        lp_output = Some(out);
    }

    let mut ami = None;
    let mut assignments = None;
    let mut cluster_output = None;
    if matches!(config.task, TaskArg::Cluster | TaskArg::Both) {
        let k = match (&labels, config.clusters) {
            (_, Some(k)) => k,
            (Some(l), None) => count_distinct(l),
            (None, None) => {
                return Err(Error::InvalidArgument("clustering needs --labels or --clusters".into()));
            }
        };
        let out = crate::model::train(&g, &x, &tc)?;
        let c = kmeans_restarts(out.embeddings.view(), k, config.seed, KMEANS_MAX_ITERS, config.kmeans_restarts.max(1))?;
        if let Some(l) = &labels {
            let v = adjusted_mutual_information(&c.assignments, l)?;
            info!("AMI {v:.4}");
            ami = Some(v);
        }
        assignments = Some(c.assignments);
        cluster_output = Some(out);
    }

    let output = lp_output.or(cluster_output).expect("at least one task runs");
    let ((auc_v, ap_v), val) = match metrics_lp {
        Some((t, v)) => ((Some(t.0), Some(t.1)), v),
        None => ((None, None), None),
    };
    let metrics = Metrics {
        auc: auc_v,
        ap: ap_v,
        val_auc: val.map(|v| v.0),
        val_ap: val.map(|v| v.1),
        ami,
        loss_history: output.loss_history.clone(),
        train_seconds: output.train_seconds,
        sample_seconds: output.sample_seconds,
        n_s_used: output.n_s_used,
        num_nodes: n,
        num_edges: g.num_edges(),
        config: config.clone(),
    };
    Ok(RunReport {
        metrics,
        graph: g,
        output,
        train_config: tc,
        assignments,
    })
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    fs::write(path, text + "\n").map_err(io_err(path))
}

/// `node,dim_0,...` header, then one row per node keyed by its original id.
pub fn write_embeddings(path: &Path, g: &Graph, z: &Array2<f64>) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    let mut write = || -> std::io::Result<()> {
        write!(w, "node")?;
        for k in 0..z.ncols() {
            write!(w, ",dim_{k}")?;
        }
        writeln!(w)?;
        for (i, row) in z.outer_iter().enumerate() {
            write!(w, "{}", g.node_ids()[i])?;
            for v in row {
                write!(w, ",{v}")?;
            }
            writeln!(w)?;
        }
        w.flush()
    };
    write().map_err(io_err(path))
}

/// Writes `embeddings.csv`, `metrics.json`, `model.json` and `config.json`
/// into the output directory.
pub fn write_outputs(report: &RunReport) -> Result<()> {
    let dir = &report.metrics.config.out_dir;
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    write_embeddings(&dir.join("embeddings.csv"), &report.graph, &report.output.embeddings)?;
    write_json(&dir.join("metrics.json"), &report.metrics)?;
    write_json(&dir.join("config.json"), &report.metrics.config)?;
    Checkpoint::new(&report.output.model, &report.train_config).save(dir.join("model.json"))?;
    if let Some(a) = &report.assignments {
        let path = dir.join("clusters.csv");
        let mut text = String::from("node,cluster\n");
        for (i, c) in a.iter().enumerate() {
            text.push_str(&format!("{},{c}\n", report.graph.node_ids()[i]));
        }
        fs::write(&path, text).map_err(io_err(&path))?;
    }
    Ok(())
}

pub fn load_run_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        message: e.to_string(),
    })
}
