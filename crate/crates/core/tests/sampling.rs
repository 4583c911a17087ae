use fastgae::graph::Graph;
use fastgae::sampler::{
    build_distribution, expected_fastgae_loss, fastgae_loss, inclusion_matrix, inclusion_prob_exact,
    inclusion_prob_with_replacement, sample_nodes, threshold_subgraph_size,
};
use fastgae::{ImportanceMeasure, ThresholdParams};
use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const DRAWS: usize = 100_000;

// two-sided normal tail of 4.4 sd is about 1.1e-5, so roughly a 1% chance of
// any false alarm across the ~900 frequencies below
const FAMILYWISE_Z: f64 = 4.4;

fn graphs() -> Vec<Graph> {
    vec![
        Graph::from_edges(2, &[(0, 1)]).unwrap(),
        Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap(),
        Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2)]).unwrap(),
        Graph::from_edges(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4)]).unwrap(),
        Graph::from_edges(6, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (3, 4), (4, 5)]).unwrap(),
    ]
}

#[test]
fn inclusion_frequencies_match_closed_forms_familywise() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst: f64 = 0.0;
    for g in graphs() {
        let n = g.num_nodes();
        for (measure, alpha) in [
            (ImportanceMeasure::Uniform, 1.0),
            (ImportanceMeasure::Degree, 1.0),
            (ImportanceMeasure::Core, 2.0),
        ] {
            let dist = build_distribution(&g, measure, alpha).unwrap();
            for n_s in 1..=3.min(n) {
                for with_replacement in [false, true] {
                    let mut hits = Array2::<usize>::zeros((n, n));
                    for _ in 0..DRAWS {
                        let set = sample_nodes(&g, &dist, n_s, with_replacement, &mut rng)
                            .unwrap()
                            .distinct_sorted();
                        for &i in &set {
                            for &j in &set {
                                hits[[i, j]] += 1;
                            }
                        }
                    }
                    for i in 0..n {
                        for j in i..n {
                            let other = (j != i).then_some(j);
                            let p = if with_replacement {
                                inclusion_prob_with_replacement(&dist, n_s, i, other)
                            } else {
                                inclusion_prob_exact(&dist, n_s, i, other).unwrap()
                            };
                            let freq = hits[[i, j]] as f64 / DRAWS as f64;
                            let se = (p * (1.0 - p) / DRAWS as f64).sqrt();
                            if se == 0.0 {
                                assert!((freq - p).abs() < 1e-12);
                                continue;
                            }
                            let z = (freq - p).abs() / se;
                            worst = worst.max(z);
                            assert!(
                                z < FAMILYWISE_Z,
                                "n={n} {measure:?} ns={n_s} wr={with_replacement} ({i},{j}): {freq} vs {p}"
                            );
                        }
                    }
                }
            }
        }
    }
    assert!(worst > 0.0);
}

#[test]
fn subset_dp_matches_enumeration() {
    let g = graphs().pop().unwrap();
    for measure in [ImportanceMeasure::Degree, ImportanceMeasure::Core] {
        let dist = build_distribution(&g, measure, 1.5).unwrap();
        for n_s in 1..=4 {
            let m = inclusion_matrix(&dist, n_s, false).unwrap();
            for i in 0..6 {
                for j in 0..6 {
                    let other = (j != i).then_some(j);
                    let e = inclusion_prob_exact(&dist, n_s, i, other).unwrap();
                    assert!((m[[i, j]] - e).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn worked_inclusion_example() {
    // p = (0.5, 0.3, 0.2), two draws: node 0 is missed only when it is not
    // first and not second
    let p = 0.5 + 0.3 * (0.5 / 0.7) + 0.2 * (0.5 / 0.8);
    let dist = fastgae::ImportanceDistribution::from_probs(vec![0.5, 0.3, 0.2]).unwrap();
    assert!((inclusion_prob_exact(&dist, 2, 0, None).unwrap() - p).abs() < 1e-12);
    assert!((p - 0.8392857142857143).abs() < 1e-12);
}

#[test]
fn realized_loss_is_unbiased_for_its_expectation() {
    let g = graphs().pop().unwrap();
    let losses = Array2::from_shape_fn((6, 6), |(i, j)| 1.0 + (i + j) as f64 * 0.1 + if i == j { 0.5 } else { 0.0 });
    let dist = build_distribution(&g, ImportanceMeasure::Degree, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for with_replacement in [false, true] {
        let expected = expected_fastgae_loss(&dist, 3, losses.view(), with_replacement).unwrap();
        let mut total = 0.0;
        for _ in 0..DRAWS {
            let s = sample_nodes(&g, &dist, 3, with_replacement, &mut rng).unwrap();
            total += fastgae_loss(losses.view(), &s);
        }
        let mean = total / DRAWS as f64;
        assert!(((mean - expected) / expected).abs() < 0.01, "{mean} vs {expected}");
    }
}

#[test]
fn threshold_known_sizes() {
    let params = ThresholdParams::default();
    for (n, want) in [(2708, 440), (3327, 488), (19717, 1187), (100_000, 2673), (875_713, 7911)] {
        assert_eq!(threshold_subgraph_size(n, &params), want);
    }
}
