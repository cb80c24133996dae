use gern::graph::cutsize;
use gern::io::{clique_chain_edges, synth_sbm};
use gern::linearize::PathGraph;
use gern::resistance::{effective_resistance_exact, resistance_weighted_cutsize};
use gern::wta::{wta_expected_mistakes, wta_play, OrderMode};
use gern::{Graph, Labels, RngStream};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

/// Ten cliques of ten joined in a chain, plus `extra` additional bridges
/// between random pairs of distinct cliques.
fn caveman(extra: usize, rng: &mut impl Rng) -> (Graph, Labels) {
    let mut edges = clique_chain_edges(10, 10);
    let mut added = 0;
    while added < extra {
        let (a, b) = (rng.random_range(0..10), rng.random_range(0..10));
        if a == b {
            continue;
        }
        let (u, v) = (
            a * 10 + rng.random_range(0..10),
            b * 10 + rng.random_range(0..10),
        );
        if !edges.contains(&(u.min(v), u.max(v)))
            && !edges.contains(&(u, v))
            && !edges.contains(&(v, u))
        {
            edges.push((u, v));
            added += 1;
        }
    }
    let g = Graph::from_edges(100, &edges).unwrap();
    let y = Labels::new((0..100).map(|v| v / 10).collect(), 10).unwrap();
    (g, y)
}

#[test]
fn more_bridges_mean_more_mistakes() {
    let mut rng = RngStream::new(8, 0).rng();
    let (sparse, y) = caveman(0, &mut rng);
    let (dense, _) = caveman(9, &mut rng);
    assert_eq!(cutsize(&sparse, &y).unwrap(), 9);
    assert_eq!(cutsize(&dense, &y).unwrap(), 18);
    let a = wta_expected_mistakes(
        &sparse,
        &y,
        2000,
        OrderMode::Random,
        0,
        RngStream::new(8, 1),
    )
    .unwrap();
    let b = wta_expected_mistakes(&dense, &y, 2000, OrderMode::Random, 0, RngStream::new(8, 2))
        .unwrap();
    assert!(
        b.mean - a.mean > 2.0 * (a.stderr.hypot(b.stderr)),
        "{} +- {} vs {} +- {}",
        a.mean,
        a.stderr,
        b.mean,
        b.stderr
    );
}

#[test]
fn resistance_cut_is_below_plain_cut_on_sbm() {
    let (mut weighted, mut plain) = (0.0, 0.0);
    for s in 0..5 {
        let b = synth_sbm(4, 25, 0.5, 0.05, &mut RngStream::new(9, s).rng()).unwrap();
        let r = effective_resistance_exact(&b.graph).unwrap();
        weighted += resistance_weighted_cutsize(&b.graph, &b.labels, &r).unwrap();
        plain += cutsize(&b.graph, &b.labels).unwrap() as f64;
    }
    assert!(weighted < plain, "{weighted} vs {plain}");
}

proptest! {
    #[test]
    fn each_prediction_copies_the_nearest_earliest_revealed(seed in any::<u64>(), n in 1usize..30, classes in 2usize..4) {
        let mut rng = RngStream::new(seed, 0).rng();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let path = PathGraph::from_order(order).unwrap();
        let y = Labels::new((0..n).map(|_| rng.random_range(0..classes)).collect(), classes).unwrap();
        let mut reveal: Vec<usize> = (0..n).collect();
        reveal.shuffle(&mut rng);
        let game = wta_play(&path, &y, &reveal, 1).unwrap();
        prop_assert_eq!(&game.order, &reveal);
        prop_assert_eq!(game.predictions[0], 1);
        for i in 1..n {
            let v = reveal[i];
            let dist = |u: usize| path.position(u).abs_diff(path.position(v));
            // min_by_key keeps the first minimum, i.e. the earliest revealed.
            let nearest = reveal[..i].iter().copied().min_by_key(|&u| dist(u)).unwrap();
            prop_assert_eq!(game.predictions[i], y.get(nearest));
        }
        for (i, &v) in game.order.iter().enumerate() {
            prop_assert_eq!(game.truths[i], y.get(v));
            prop_assert_eq!(game.mistakes[i], game.predictions[i] != game.truths[i]);
        }
        prop_assert_eq!(game.total_mistakes, game.mistakes.iter().filter(|&&m| m).count());
        if path.edges().all(|(u, v)| y.get(u) == y.get(v)) {
            prop_assert_eq!(game.total_mistakes, usize::from(y.get(0) != 1));
        }
    }
}
