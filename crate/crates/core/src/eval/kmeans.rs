use ndarray::{Array2, ArrayView1, ArrayView2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub assignments: Vec<usize>,
    /// `k × d` centroids.
    pub centroids: Array2<f64>,
    /// Sum of squared distances from each point to its centroid.
    pub inertia: f64,
    /// Lloyd iterations run.
    pub iterations: usize,
}

fn sq_dist(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(point: ArrayView1<'_, f64>, centroids: &Array2<f64>) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, row) in centroids.axis_iter(Axis(0)).enumerate() {
        let d = sq_dist(point, row);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// k-means++ seeding: the first centre is uniform, each later one is drawn
/// with probability proportional to the squared distance to the closest
/// centre chosen so far.
fn seed_centroids(z: ArrayView2<'_, f64>, k: usize, rng: &mut ChaCha8Rng) -> Array2<f64> {
    let n = z.nrows();
    let mut centroids = Array2::zeros((k, z.ncols()));
    let first = rng.random_range(0..n);
    centroids.row_mut(0).assign(&z.row(first));
    let mut dist: Vec<f64> = z.axis_iter(Axis(0)).map(|p| sq_dist(p, z.row(first))).collect();
    for c in 1..k {
        let total: f64 = dist.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = n - 1;
            for (i, d) in dist.iter().enumerate() {
                acc += d;
                if acc > target && *d > 0.0 {
                    pick = i;
                    break;
                }
            }
            pick
        } else {
            rng.random_range(0..n)
        };
        centroids.row_mut(c).assign(&z.row(pick));
        for (i, p) in z.axis_iter(Axis(0)).enumerate() {
            dist[i] = dist[i].min(sq_dist(p, z.row(pick)));
        }
    }
    centroids
}

/// Lloyd's algorithm from k-means++ seeding.
///
/// Stops when the assignments stop changing or after `max_iters` rounds of
/// assign-then-update. A cluster that loses all its points keeps its
/// previous centroid.
pub fn kmeans(z: ArrayView2<'_, f64>, k: usize, seed: u64, max_iters: usize) -> Result<Clustering> {
    let n = z.nrows();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("k must lie in 1..={n} (got {k})")));
    }
    if z.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("k-means input must be finite".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = seed_centroids(z, k, &mut rng);
    let mut assignments = vec![usize::MAX; n];
    let mut iterations = 0;
    while iterations < max_iters {
        let mut changed = false;
        for (i, p) in z.axis_iter(Axis(0)).enumerate() {
            let (c, _) = nearest(p, &centroids);
            if assignments[i] != c {
                assignments[i] = c;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        iterations += 1;
        let mut sums = Array2::<f64>::zeros(centroids.raw_dim());
        let mut counts = vec![0usize; k];
        for (i, p) in z.axis_iter(Axis(0)).enumerate() {
            sums.row_mut(assignments[i]).scaled_add(1.0, &p);
            counts[assignments[i]] += 1;
        }
        for (c, &count) in counts.iter().enumerate() {
            if count > 0 {
                let mean = &sums.row(c) / count as f64;
                centroids.row_mut(c).assign(&mean);
            }
        }
    }
    if assignments[0] == usize::MAX {
        // max_iters == 0: report the seeding assignment
        for (i, p) in z.axis_iter(Axis(0)).enumerate() {
            assignments[i] = nearest(p, &centroids).0;
        }
    }
    let inertia = z
        .axis_iter(Axis(0))
        .zip(&assignments)
        .map(|(p, &c)| sq_dist(p, centroids.row(c)))
        .sum();
    Ok(Clustering {
        assignments,
        centroids,
        inertia,
        iterations,
    })
}

/// Best of `restarts` k-means runs by inertia, with seeds `seed, seed+1, ...`.
pub fn kmeans_restarts(
    z: ArrayView2<'_, f64>,
    k: usize,
    seed: u64,
    max_iters: usize,
    restarts: usize,
) -> Result<Clustering> {
    let mut best = kmeans(z, k, seed, max_iters)?;
    for r in 1..restarts as u64 {
        let c = kmeans(z, k, seed.wrapping_add(r), max_iters)?;
        if c.inertia < best.inertia {
            best = c;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use rand_distr::{Distribution, StandardNormal};

    fn blobs(per: usize, centres: &[(f64, f64)], spread: f64, seed: u64) -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut z = Array2::zeros((per * centres.len(), 2));
        for (c, &(x, y)) in centres.iter().enumerate() {
            for i in 0..per {
                let a: f64 = StandardNormal.sample(&mut rng);
                let b: f64 = StandardNormal.sample(&mut rng);
                z[[c * per + i, 0]] = x + spread * a;
                z[[c * per + i, 1]] = y + spread * b;
            }
        }
        z
    }

    #[test]
    fn separates_two_clouds() {
        let z = blobs(40, &[(0.0, 0.0), (20.0, 20.0)], 1.0, 3);
        for seed in 0..5 {
            let c = kmeans(z.view(), 2, seed, 100).unwrap();
            let first = c.assignments[0];
            assert!(c.assignments[..40].iter().all(|&a| a == first));
            assert!(c.assignments[40..].iter().all(|&a| a != first));
        }
    }

    #[test]
    fn single_cluster_is_mean() {
        let z = array![[1.0, 2.0], [3.0, 6.0], [5.0, 1.0]];
        let c = kmeans(z.view(), 1, 0, 10).unwrap();
        assert_abs_diff_eq!(c.centroids[[0, 0]], 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.centroids[[0, 1]], 3.0, epsilon = 1e-12);
        assert_eq!(c.assignments, vec![0, 0, 0]);
    }

    #[test]
    fn inertia_matches_definition_and_never_increases() {
        let z = blobs(30, &[(0.0, 0.0), (3.0, 0.0), (0.0, 3.0), (3.0, 3.0)], 1.2, 8);
        let mut prev = f64::INFINITY;
        // the same seed replays the same trajectory, so truncating it at
        // t iterations exposes the inertia after each Lloyd step
        for t in 1..15 {
            let c = kmeans(z.view(), 4, 5, t).unwrap();
            let direct: f64 = (0..z.nrows())
                .map(|i| sq_dist(z.row(i), c.centroids.row(c.assignments[i])))
                .sum();
            assert_abs_diff_eq!(c.inertia, direct, epsilon = 1e-9);
            assert!(c.inertia <= prev + 1e-12, "step {t}: {} > {prev}", c.inertia);
            assert!(c.assignments.iter().all(|&a| a < 4));
            prev = c.inertia;
        }
    }

    #[test]
    fn deterministic_and_errors() {
        let z = blobs(10, &[(0.0, 0.0), (5.0, 5.0)], 2.0, 1);
        assert_eq!(kmeans(z.view(), 3, 7, 50).unwrap(), kmeans(z.view(), 3, 7, 50).unwrap());
        assert!(kmeans(z.view(), 21, 0, 10).is_err());
        assert!(kmeans(z.view(), 0, 0, 10).is_err());
        // duplicate points with k = n still works
        let dup = Array2::<f64>::zeros((3, 2));
        let c = kmeans(dup.view(), 3, 0, 10).unwrap();
        assert_eq!(c.inertia, 0.0);
    }

    #[test]
    fn restarts_never_worse() {
        let z = blobs(20, &[(0.0, 0.0), (2.0, 0.0), (1.0, 2.0)], 0.8, 4);
        let single = kmeans(z.view(), 3, 11, 100).unwrap();
        let best = kmeans_restarts(z.view(), 3, 11, 100, 8).unwrap();
        assert!(best.inertia <= single.inertia);
    }
}
