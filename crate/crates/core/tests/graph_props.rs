use std::collections::{BTreeSet, HashSet};

use proptest::prelude::*;
use walkbench::graph::{build_graph, largest_component, load_edge_list, split_labeled, Graph};

fn edge_text(pairs: &[(u16, u16)]) -> String {
    pairs.iter().map(|(a, b)| format!("v{a} v{b}\n")).collect()
}

/// Undirected, loop-free pairs as unordered label sets.
fn canonical(pairs: &[(u16, u16)]) -> BTreeSet<(String, String)> {
    pairs
        .iter()
        .filter(|(a, b)| a != b)
        .map(|&(a, b)| {
            let (x, y) = (format!("v{a}"), format!("v{b}"));
            if x < y { (x, y) } else { (y, x) }
        })
        .collect()
}

fn graph_pairs(g: &Graph) -> BTreeSet<(String, String)> {
    g.edges()
        .map(|(u, v)| {
            let (x, y) = (g.label(u).to_owned(), g.label(v).to_owned());
            if x < y { (x, y) } else { (y, x) }
        })
        .collect()
}

fn pair_list(max_node: u16, max_len: usize) -> impl Strategy<Value = Vec<(u16, u16)>> {
    prop::collection::vec((0..max_node, 0..max_node), 1..max_len)
}

/// Components by repeated relaxation, as an oracle for connectivity.
fn is_connected(g: &Graph) -> bool {
    let n = g.node_count();
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut changed = true;
    while changed {
        changed = false;
        for (u, v) in g.edges() {
            if seen[u] != seen[v] {
                seen[u] = true;
                seen[v] = true;
                changed = true;
            }
        }
    }
    seen.iter().all(|&s| s)
}

proptest! {
    #[test]
    fn built_graph_is_simple_and_symmetric(pairs in pair_list(40, 200)) {
        let raw = load_edge_list(edge_text(&pairs).as_bytes()).unwrap();
        let expected = canonical(&pairs);
        match build_graph(&raw) {
            Ok(g) => {
                prop_assert!(g.is_well_formed());
                prop_assert_eq!(g.edge_count(), expected.len());
                prop_assert_eq!(graph_pairs(&g), expected);
                for u in 0..g.node_count() {
                    let nb = g.neighbors(u);
                    prop_assert!(nb.windows(2).all(|w| w[0] < w[1]));
                    prop_assert!(!nb.contains(&u));
                    for &v in nb {
                        prop_assert!(g.has_edge(v, u));
                    }
                }
                let degree_sum: usize = (0..g.node_count()).map(|u| g.degree(u)).sum();
                prop_assert_eq!(degree_sum, 2 * g.edge_count());
            }
            Err(_) => prop_assert!(expected.is_empty()),
        }
    }

    #[test]
    fn largest_component_is_connected_and_idempotent(pairs in pair_list(60, 80)) {
        let raw = load_edge_list(edge_text(&pairs).as_bytes()).unwrap();
        if let Ok(g) = build_graph(&raw) {
            let lcc = largest_component(&g);
            prop_assert!(is_connected(&lcc));
            prop_assert!(lcc.is_well_formed());
            let (_, sizes) = g.components();
            prop_assert_eq!(lcc.node_count(), sizes.iter().copied().max().unwrap());
            let again = largest_component(&lcc);
            prop_assert_eq!(graph_pairs(&again), graph_pairs(&lcc));
            prop_assert_eq!(again.node_count(), lcc.node_count());
            // Every kept edge exists in the original graph.
            prop_assert!(graph_pairs(&lcc).is_subset(&graph_pairs(&g)));
        }
    }
}

fn random_connected(n: usize, extra: usize, seed: u64) -> Graph {
    let mut s = seed | 1;
    let mut next = |m: usize| {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        (s % m as u64) as usize
    };
    let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (next(v), v)).collect();
    for _ in 0..extra {
        edges.push((next(n), next(n)));
    }
    Graph::from_edges(n, edges)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn split_invariants(n in 6usize..500, density in 0usize..4, seed in any::<u64>(), fraction in 0.05f64..0.6) {
        let g = random_connected(n, n * density, seed);
        let m = g.edge_count();
        let k = (fraction * m as f64).floor() as usize;
        prop_assume!(k >= 1);
        let (residual, labels) = split_labeled(&g, fraction, seed).unwrap();

        prop_assert_eq!(labels.n_pos(), k);
        prop_assert_eq!(labels.n_neg(), k);
        prop_assert_eq!(residual.edge_count(), m - k);
        prop_assert_eq!(residual.node_count(), n);
        prop_assert!(residual.is_well_formed());

        let mut seen = HashSet::new();
        for e in &labels.edges {
            let key = (e.u.min(e.v), e.u.max(e.v));
            prop_assert!(key.0 != key.1);
            prop_assert!(seen.insert(key), "duplicate labeled pair {:?}", key);
            if e.label.is_positive() {
                prop_assert!(g.has_edge(e.u, e.v));
                prop_assert!(!residual.has_edge(e.u, e.v));
            } else {
                prop_assert!(!g.has_edge(e.u, e.v));
            }
        }
        for (u, v) in residual.edges() {
            prop_assert!(g.has_edge(u, v));
        }

        let (residual2, labels2) = split_labeled(&g, fraction, seed).unwrap();
        prop_assert_eq!(labels, labels2);
        prop_assert_eq!(residual, residual2);
    }
}
