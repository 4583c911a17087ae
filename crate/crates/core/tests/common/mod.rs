#![allow(dead_code)]

use fastgae::graph::{NodeFeatures, NormalizedAdjacency};
use fastgae::model::{loss_and_gradients, LossConfig, PairSet};
use fastgae::{GcnModel, Graph};
use ndarray::Array2;
use rand::Rng;

/// Erdős–Rényi graph G(n, p).
pub fn random_graph<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

/// Core numbers by definition: node v has core number k when it survives
/// repeated deletion of nodes with fewer than k remaining neighbours, but
/// not the same procedure for k + 1.
pub fn brute_force_cores(g: &Graph) -> Vec<usize> {
    let n = g.num_nodes();
    let mut core = vec![0; n];
    for k in 1..n {
        let mut alive = vec![true; n];
        loop {
            let mut removed = false;
            for v in 0..n {
                if alive[v] && g.neighbors(v).iter().filter(|&&u| alive[u]).count() < k {
                    alive[v] = false;
                    removed = true;
                }
            }
            if !removed {
                break;
            }
        }
        if !alive.iter().any(|&a| a) {
            break;
        }
        for v in 0..n {
            if alive[v] {
                core[v] = k;
            }
        }
    }
    core
}

/// Largest elementwise relative error between analytic gradients and
/// central differences with step `h`. Relative error is
/// `|a - f| / max(|a|, |f|, floor)`.
#[allow(clippy::too_many_arguments)]
pub fn max_gradient_error(
    model: &GcnModel,
    a: &NormalizedAdjacency,
    x: &NodeFeatures,
    g: &Graph,
    pairs: &PairSet,
    config: &LossConfig,
    noise: Option<&Array2<f64>>,
    mask: Option<&Array2<f64>>,
    h: f64,
    floor: f64,
) -> f64 {
    let (_, grads) = loss_and_gradients(model, a, x, g, pairs, config, noise, mask).unwrap();
    let analytic: Vec<Array2<f64>> = grads.params().into_iter().cloned().collect();
    let loss_at = |m: &GcnModel| loss_and_gradients(m, a, x, g, pairs, config, noise, mask).unwrap().0.total;
    let mut worst: f64 = 0.0;
    for (k, grad) in analytic.iter().enumerate() {
        for ((r, c), &an) in grad.indexed_iter() {
            let mut plus = model.clone();
            plus.params_mut()[k][[r, c]] += h;
            let mut minus = model.clone();
            minus.params_mut()[k][[r, c]] -= h;
            let fd = (loss_at(&plus) - loss_at(&minus)) / (2.0 * h);
            let rel = (an - fd).abs() / an.abs().max(fd.abs()).max(floor);
            worst = worst.max(rel);
        }
    }
    worst
}
