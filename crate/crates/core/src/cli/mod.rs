//! Command-line front end: `train`, `threshold`, `sbm` and `stats`.

mod run;

pub use run::{
    execute, load_run_config, resolve_sizes, write_embeddings, write_outputs, Metrics, ModelArg, RunConfig,
    RunReport, SamplerArg, SubgraphSizeArg, TaskArg, LARGE_GRAPH_NODES,
};

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::warn;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{core_numbers, degrees, load_edge_list, parse_edge_list, write_edge_list};
use crate::sampler::{threshold_subgraph_size, LossKind, ThresholdParams};
use crate::synth::{generate_sbm, SbmSpec};

#[derive(Debug, Parser)]
#[command(name = "fastgae", version, about = "Graph autoencoders with stochastic subgraph decoding")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a model and evaluate link prediction and/or clustering.
    Train(Box<TrainArgs>),
    /// Print the threshold subgraph size for a graph with n nodes.
    Threshold(ThresholdArgs),
    /// Generate a stochastic block model graph.
    Sbm(SbmArgs),
    /// Print graph statistics as JSON.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Edge list to train on.
    #[arg(long, required_unless_present = "config")]
    pub input: Option<PathBuf>,
    /// Rerun a `config.json` written by an earlier run; other flags except
    /// --out-dir are ignored.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Headerless CSV of node features; identity features if omitted.
    #[arg(long)]
    pub features: Option<PathBuf>,
    /// Ground-truth communities, one integer per line.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "gae")]
    pub model: ModelArg,
    #[arg(long, value_enum, default_value = "degree")]
    pub sampler: SamplerArg,
    /// Sharpening exponent of the importance distribution.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Nodes per sampled subgraph, or "auto" for the threshold size.
    #[arg(long, default_value = "auto")]
    pub subgraph_size: SubgraphSizeArg,
    /// Sample nodes with replacement.
    #[arg(long)]
    pub with_replacement: bool,
    #[arg(long, default_value_t = 16)]
    pub dim: usize,
    #[arg(long, default_value_t = 32)]
    pub hidden: usize,
    #[arg(long, default_value_t = 0.01)]
    pub lr: f64,
    /// Defaults to 200, or 300 for graphs with at least 100000 nodes.
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    pub dropout: f64,
    #[arg(long, default_value_t = 0.05)]
    pub val_frac: f64,
    #[arg(long, default_value_t = 0.10)]
    pub test_frac: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.1)]
    pub confidence: f64,
    #[arg(long, default_value_t = 0.001)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "lp")]
    pub task: TaskArg,
    /// Number of k-means clusters; defaults to the number of distinct labels.
    #[arg(long)]
    pub clusters: Option<usize>,
    #[arg(long, default_value_t = 10)]
    pub kmeans_restarts: usize,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LossArg {
    CrossEntropy,
    Frobenius,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.1)]
    pub confidence: f64,
    #[arg(long, default_value_t = 0.001)]
    pub epsilon: f64,
    #[arg(long, value_enum, default_value = "cross-entropy")]
    pub loss: LossArg,
}

#[derive(Debug, Args)]
pub struct SbmArgs {
    #[arg(long)]
    pub communities: usize,
    #[arg(long)]
    pub community_size: usize,
    #[arg(long)]
    pub p_in: f64,
    #[arg(long)]
    pub p_out: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Writes <prefix>.edges and <prefix>.labels.
    #[arg(long)]
    pub out_prefix: PathBuf,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub input: PathBuf,
}

impl TrainArgs {
    /// The fully resolved run configuration.
    pub fn resolve(&self) -> Result<RunConfig> {
        if let Some(path) = &self.config {
            let mut cfg = load_run_config(path)?;
            cfg.out_dir = self.out_dir.clone();
            return Ok(cfg);
        }
        let input = self.input.clone().expect("clap enforces --input");
        let g = load_edge_list(&input)?;
        let params = ThresholdParams {
            gamma: self.gamma,
            confidence_alpha: self.confidence,
            epsilon: self.epsilon,
            loss_kind: LossKind::CrossEntropy,
        };
        let (subgraph_size, iterations) =
            resolve_sizes(g.num_nodes(), self.sampler, self.subgraph_size, self.iterations, &params)?;
        Ok(RunConfig {
            input,
            features: self.features.clone(),
            labels: self.labels.clone(),
            model: self.model,
            sampler: self.sampler,
            alpha: self.alpha,
            subgraph_size,
            with_replacement: self.with_replacement,
            dim: self.dim,
            hidden: self.hidden,
            lr: self.lr,
            iterations,
            dropout: self.dropout,
            val_frac: self.val_frac,
            test_frac: self.test_frac,
            gamma: self.gamma,
            confidence: self.confidence,
            epsilon: self.epsilon,
            seed: self.seed,
            task: self.task,
            clusters: self.clusters,
            kmeans_restarts: self.kmeans_restarts,
            out_dir: self.out_dir.clone(),
        })
    }
}

#[derive(Debug, Serialize)]
pub struct GraphStats {
    pub n: usize,
    pub m: usize,
    pub min_degree: usize,
    pub max_degree: usize,
    pub mean_degree: f64,
    pub median_degree: f64,
    pub isolated_nodes: usize,
    pub max_core: usize,
}

pub fn graph_stats(g: &crate::graph::Graph) -> GraphStats {
    let mut deg = degrees(g);
    deg.sort_unstable();
    let n = deg.len();
    let median = if n % 2 == 1 {
        deg[n / 2] as f64
    } else {
        (deg[n / 2 - 1] + deg[n / 2]) as f64 / 2.0
    };
    GraphStats {
        n,
        m: g.num_edges(),
        min_degree: deg[0],
        max_degree: deg[n - 1],
        mean_degree: 2.0 * g.num_edges() as f64 / n as f64,
        median_degree: median,
        isolated_nodes: deg.iter().take_while(|&&d| d == 0).count(),
        max_core: core_numbers(g).into_iter().max().unwrap_or(0),
    }
}

fn cmd_train(args: &TrainArgs) -> Result<()> {
    let config = args.resolve()?;
    let report = execute(&config)?;
    write_outputs(&report)?;
    let m = &report.metrics;
    let show = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.4}"));
    println!(
        "auc {} ap {} ami {} n_s {} train {:.2}s",
        show(m.auc),
        show(m.ap),
        show(m.ami),
        m.n_s_used.map_or("-".to_string(), |v| v.to_string()),
        m.train_seconds
    );
    Ok(())
}

fn cmd_threshold(args: &ThresholdArgs) -> Result<()> {
    if args.n == 0 {
        return Err(Error::InvalidArgument("--n must be >= 1".into()));
    }
    let params = ThresholdParams {
        gamma: args.gamma,
        confidence_alpha: args.confidence,
        epsilon: args.epsilon,
        loss_kind: match args.loss {
            LossArg::CrossEntropy => LossKind::CrossEntropy,
            LossArg::Frobenius => LossKind::Frobenius,
        },
    };
    params.validate()?;
    println!("{}", threshold_subgraph_size(args.n, &params));
    Ok(())
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn cmd_sbm(args: &SbmArgs) -> Result<()> {
    let spec = SbmSpec {
        num_communities: args.communities,
        community_size: args.community_size,
        p_in: args.p_in,
        p_out: args.p_out,
        seed: args.seed,
    };
    let (g, labels) = generate_sbm(&spec)?;
    let mut edges = Vec::new();
    write_edge_list(&g, &mut edges).expect("writing to memory");
    let edge_path = with_suffix(&args.out_prefix, ".edges");
    let label_path = with_suffix(&args.out_prefix, ".labels");
    // the loader numbers nodes by first appearance, so reparse to align labels
    let text = String::from_utf8(edges).expect("edge list is ASCII");
    let order: Vec<u64> = match parse_edge_list(&text, &edge_path) {
        Ok(loaded) => loaded.node_ids().to_vec(),
        Err(Error::EmptyGraph) => Vec::new(),
        Err(e) => return Err(e),
    };
    if order.len() < g.num_nodes() {
        warn!(
            "{} isolated nodes cannot be written to an edge list and are dropped",
            g.num_nodes() - order.len()
        );
    }
    let mut label_text = String::new();
    for id in order {
        label_text.push_str(&format!("{}\n", labels[id as usize]));
    }
    let write = |path: &Path, data: &[u8]| {
        fs::File::create(path)
            .and_then(|mut f| f.write_all(data))
            .map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })
    };
    write(&edge_path, text.as_bytes())?;
    write(&label_path, label_text.as_bytes())?;
    println!("{} nodes, {} edges -> {}", g.num_nodes(), g.num_edges(), edge_path.display());
    Ok(())
}

fn cmd_stats(args: &StatsArgs) -> Result<()> {
    let g = load_edge_list(&args.input)?;
    let stats = graph_stats(&g);
    println!("{}", serde_json::to_string(&stats).expect("stats serialize"));
    Ok(())
}

/// Parses `args` (program name first) and runs the command; returns the
/// process exit code.
pub fn run_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = match &cli.command {
        Command::Train(a) => cmd_train(a),
        Command::Threshold(a) => cmd_threshold(a),
        Command::Sbm(a) => cmd_sbm(a),
        Command::Stats(a) => cmd_stats(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

pub fn run() -> i32 {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    run_with(std::env::args_os())
}
