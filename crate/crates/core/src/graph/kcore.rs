use super::Graph;

/// Core number of every node, by bucket peeling in `O(n + m)`.
///
/// Nodes are kept in an array sorted by current degree, with `bin_start[k]`
/// the first position holding degree `k`. Removing the lowest node moves each
/// higher-degree neighbour one bucket down with a single swap.
pub fn core_numbers(g: &Graph) -> Vec<usize> {
    let n = g.num_nodes();
    let mut deg: Vec<usize> = (0..n).map(|i| g.degree(i)).collect();
    let max_deg = deg.iter().copied().max().unwrap_or(0);

    let mut bin_start = vec![0usize; max_deg + 2];
    for &d in &deg {
        bin_start[d + 1] += 1;
    }
    for k in 1..bin_start.len() {
        bin_start[k] += bin_start[k - 1];
    }

    let mut order = vec![0usize; n];
    let mut pos = vec![0usize; n];
    let mut next = bin_start.clone();
    for v in 0..n {
        pos[v] = next[deg[v]];
        order[pos[v]] = v;
        next[deg[v]] += 1;
    }

    for idx in 0..n {
        let v = order[idx];
        for &u in g.neighbors(v) {
            if deg[u] > deg[v] {
                let du = deg[u];
                let first = bin_start[du];
                let w = order[first];
                if u != w {
                    order.swap(pos[u], first);
                    pos[w] = pos[u];
                    pos[u] = first;
                }
                bin_start[du] += 1;
                deg[u] -= 1;
            }
        }
    }
    deg
}
