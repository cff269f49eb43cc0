use proptest::prelude::*;
use walkbench::graph::Graph;
use walkbench::walk::{generate_corpus, read_corpus, write_corpus, WalkConfig, WalkKind};

fn kind_strategy() -> impl Strategy<Value = WalkKind> {
    prop_oneof![
        Just(WalkKind::Rw),
        Just(WalkKind::Dg),
        Just(WalkKind::Id),
        (0.0f64..3.0).prop_map(|lambda| WalkKind::Tsaw { lambda }),
        (0.1f64..4.0, 0.1f64..4.0).prop_map(|(p, q)| WalkKind::n2v(p, q)),
    ]
}

/// Graph with some isolated nodes and a few components.
fn graph_strategy() -> impl Strategy<Value = Graph> {
    (2usize..30).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n), 0..3 * n).prop_map(move |edges| Graph::from_edges(n, edges))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn walks_follow_edges(
        g in graph_strategy(),
        kind in kind_strategy(),
        beta in 1usize..4,
        alpha in 1usize..30,
        seed in any::<u64>(),
    ) {
        let cfg = WalkConfig { kind, walks_per_node: beta, walk_length: alpha, seed };
        let corpus = generate_corpus(&g, &cfg);
        prop_assert_eq!(corpus.len(), g.node_count() * beta);
        for (i, walk) in corpus.sequences.iter().enumerate() {
            let start = i / beta;
            prop_assert_eq!(walk[0] as usize, start);
            if g.degree(start) == 0 {
                prop_assert_eq!(walk.len(), 1);
            } else {
                prop_assert_eq!(walk.len(), alpha);
            }
            for pair in walk.windows(2) {
                prop_assert!(g.has_edge(pair[0] as usize, pair[1] as usize));
            }
        }
        let mut text = Vec::new();
        write_corpus(&corpus, &mut text).unwrap();
        prop_assert_eq!(read_corpus(text.as_slice()).unwrap(), corpus);
    }

    #[test]
    fn same_seed_same_corpus(g in graph_strategy(), kind in kind_strategy(), seed in any::<u64>()) {
        let cfg = WalkConfig { kind, walks_per_node: 2, walk_length: 12, seed };
        prop_assert_eq!(generate_corpus(&g, &cfg), generate_corpus(&g, &cfg));
    }
}

#[test]
fn tsaw_prefers_unvisited_nodes() {
    // On a cycle, a walk that must return to a visited node only does so when
    // both neighbours are visited; TSAW should sweep the cycle more often
    // than the plain random walk.
    let n = 12;
    let g = Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)));
    let coverage = |kind| {
        let corpus = generate_corpus(&g, &WalkConfig { kind, walks_per_node: 50, walk_length: 12, seed: 3 });
        let total: usize = corpus
            .sequences
            .iter()
            .map(|w| {
                let mut s = w.clone();
                s.sort_unstable();
                s.dedup();
                s.len()
            })
            .sum();
        total as f64 / corpus.len() as f64
    };
    let rw = coverage(WalkKind::Rw);
    let tsaw = coverage(WalkKind::tsaw());
    assert!(tsaw > rw + 1.0, "TSAW coverage {tsaw:.2} vs RW {rw:.2}");
}

#[test]
fn node2vec_return_parameter_controls_backtracking() {
    let g = Graph::from_edges(8, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (4, 5), (5, 6), (6, 7), (7, 4), (2, 6)]);
    let backtrack_rate = |p: f64| {
        let corpus = generate_corpus(&g, &WalkConfig { kind: WalkKind::n2v(p, 1.0), walks_per_node: 40, walk_length: 30, seed: 5 });
        let (mut back, mut steps) = (0usize, 0usize);
        for w in &corpus.sequences {
            for t in w.windows(3) {
                steps += 1;
                back += usize::from(t[0] == t[2]);
            }
        }
        back as f64 / steps as f64
    };
    assert!(backtrack_rate(0.25) > 2.0 * backtrack_rate(4.0));
}
