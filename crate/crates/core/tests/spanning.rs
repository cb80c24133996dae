mod common;

use std::collections::HashSet;

use gern::linearize::{dfs_linearize, path_cutsize, DfsStart};
use gern::resistance::{effective_resistance_exact, resistance_weighted_cutsize};
use gern::spanning::{sample_trees, TreeGenerator};
use gern::stats::chi_square_gof;
use gern::{Graph, Labels, RngStream};
use proptest::prelude::*;

use common::{enumerate_spanning_trees, grounded_resistance, tree_index, tree_key};

/// Connected graph on `n` nodes: a random attachment tree plus extra edges.
fn connected_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n)
        .prop_flat_map(|n| {
            let parents: Vec<_> = (1..n).map(|v| 0..v).collect();
            (
                Just(n),
                parents,
                proptest::collection::vec(any::<bool>(), n * (n - 1) / 2),
            )
        })
        .prop_map(|(n, parents, extra)| {
            let mut edges: Vec<(usize, usize)> = parents
                .into_iter()
                .enumerate()
                .map(|(i, p)| (p, i + 1))
                .collect();
            let mut k = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if extra[k] {
                        edges.push((u, v));
                    }
                    k += 1;
                }
            }
            Graph::build_unchecked(n, &edges).unwrap().0
        })
}

const GENERATORS: [TreeGenerator; 4] = [
    TreeGenerator::Wilson,
    TreeGenerator::AldousBroder,
    TreeGenerator::ARst { beta: 0.5 },
    TreeGenerator::RandomBfs,
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn every_sample_is_a_spanning_tree(g in connected_graph(7), seed in any::<u64>()) {
        let index = tree_index(g.node_count(), g.edges());
        for generator in GENERATORS {
            for t in sample_trees(&g, generator, 20, RngStream::new(seed, 0)).unwrap() {
                prop_assert!(index.contains_key(&tree_key(t.edges())), "{generator} produced a non-tree");
            }
        }
    }

    #[test]
    fn exact_resistance_matches_tree_counts(g in connected_graph(6)) {
        let trees = enumerate_spanning_trees(g.node_count(), g.edges());
        let r = effective_resistance_exact(&g).unwrap();
        let grounded = grounded_resistance(g.node_count(), g.edges());
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            let share = trees.iter().filter(|t| t.contains(&e)).count() as f64 / trees.len() as f64;
            prop_assert!((r.get(u, v).unwrap() - share).abs() < 1e-9);
            prop_assert!((grounded[u][v] - share).abs() < 1e-9);
        }
        let total: f64 = r.edge_values().iter().sum();
        prop_assert!((total - (g.node_count() - 1) as f64).abs() < 1e-9);
    }

    #[test]
    fn path_is_permutation_within_twice_tree_cut(
        g in connected_graph(12),
        seed in any::<u64>(),
        classes in 2usize..4,
    ) {
        let mut rng = RngStream::new(seed, 1).rng();
        let n = g.node_count();
        let y = Labels::new((0..n).map(|v| (v * 7 + seed as usize) % classes).collect(), classes).unwrap();
        for generator in GENERATORS {
            let tree = generator.sample(&g, &mut rng).unwrap();
            let path = dfs_linearize(&tree, DfsStart::Random, &mut rng).unwrap();
            let seen: HashSet<usize> = path.order().iter().copied().collect();
            prop_assert_eq!(seen.len(), n);
            for (i, &v) in path.order().iter().enumerate() {
                prop_assert_eq!(path.position(v), i);
            }
            prop_assert!(path_cutsize(&path, &y).unwrap() <= 2 * tree.cutsize(y.values()));
        }
    }

    #[test]
    fn resistance_cut_never_exceeds_cut(g in connected_graph(8), bits in any::<u32>()) {
        let n = g.node_count();
        let y = Labels::new((0..n).map(|v| ((bits >> v) & 1) as usize).collect(), 2).unwrap();
        let r = effective_resistance_exact(&g).unwrap();
        let phi_r = resistance_weighted_cutsize(&g, &y, &r).unwrap();
        prop_assert!(phi_r <= gern::graph::cutsize(&g, &y).unwrap() as f64 + 1e-9);
    }
}

#[test]
fn uniform_samplers_hit_every_tree_of_small_graphs_equally() {
    // Diamond with a pendant: 0-1, 0-2, 1-2, 1-3, 2-3, 3-4 has 8 spanning trees.
    let edges = [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (3, 4)];
    let g = Graph::from_edges(5, &edges).unwrap();
    let index = tree_index(5, g.edges());
    assert_eq!(index.len(), 8);
    for (s, generator) in [TreeGenerator::Wilson, TreeGenerator::AldousBroder]
        .into_iter()
        .enumerate()
    {
        let mut counts = vec![0u64; index.len()];
        for t in sample_trees(&g, generator, 40_000, RngStream::new(7, s as u64)).unwrap() {
            counts[index[&tree_key(t.edges())]] += 1;
        }
        let p = chi_square_gof(&counts, &[1.0 / 8.0; 8]).p_value;
        assert!(p > 1e-4, "{generator}: p = {p}, counts {counts:?}");
    }
}

#[test]
fn bfs_is_not_uniform_on_the_diamond() {
    let edges = [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (3, 4)];
    let g = Graph::from_edges(5, &edges).unwrap();
    let index = tree_index(5, g.edges());
    let mut counts = vec![0u64; index.len()];
    for t in sample_trees(&g, TreeGenerator::RandomBfs, 40_000, RngStream::new(7, 9)).unwrap() {
        counts[index[&tree_key(t.edges())]] += 1;
    }
    assert!(chi_square_gof(&counts, &[1.0 / 8.0; 8]).p_value < 1e-6);
}

#[test]
fn sample_trees_is_reproducible_across_thread_counts() {
    let g = Graph::from_edges(6, &common::complete_edges(6)).unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| sample_trees(&g, TreeGenerator::Wilson, 64, RngStream::new(3, 4)).unwrap())
    };
    let a: Vec<_> = run(1).iter().map(|t| t.edges().to_vec()).collect();
    let b: Vec<_> = run(4).iter().map(|t| t.edges().to_vec()).collect();
    assert_eq!(a, b);
}
