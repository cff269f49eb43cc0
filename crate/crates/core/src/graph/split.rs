use std::collections::HashSet;
use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Error, Result};

/// Rejection attempts per requested negative before falling back to
/// enumerating every remaining non-edge.
const REJECTION_ATTEMPTS_PER_NEGATIVE: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeLabel {
    Positive,
    Negative,
}

impl EdgeLabel {
    pub fn is_positive(self) -> bool {
        self == EdgeLabel::Positive
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.is_positive() { "1" } else { "0" })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LabeledEdge {
    pub u: usize,
    pub v: usize,
    pub label: EdgeLabel,
}

/// Held-out positive edges followed by an equal number of sampled non-edges.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabeledEdgeSet {
    pub edges: Vec<LabeledEdge>,
}

impl LabeledEdgeSet {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn n_pos(&self) -> usize {
        self.edges.iter().filter(|e| e.label.is_positive()).count()
    }

    pub fn n_neg(&self) -> usize {
        self.len() - self.n_pos()
    }

    pub fn labels(&self) -> Vec<bool> {
        self.edges.iter().map(|e| e.label.is_positive()).collect()
    }

    pub fn positives(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges
            .iter()
            .filter(|e| e.label.is_positive())
            .map(|e| (e.u, e.v))
    }
}

/// Removes `floor(fraction * |E|)` uniformly chosen edges as positives and
/// samples as many non-edges of `g` as negatives.
///
/// The residual graph keeps every node of `g`; nodes may become isolated.
pub fn split_labeled(g: &Graph, fraction: f64, seed: u64) -> Result<(Graph, LabeledEdgeSet)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "split fraction must lie in (0, 1), got {fraction}"
        )));
    }
    let all_edges: Vec<(usize, usize)> = g.edges().collect();
    let m = all_edges.len();
    let k = (fraction * m as f64).floor() as usize;
    if k == 0 {
        return Err(Error::InvalidParameter(format!(
            "removing {fraction} of {m} edges leaves nothing to predict"
        )));
    }
    let n = g.node_count();
    let available = n * (n - 1) / 2 - m;
    if available < k {
        return Err(Error::InsufficientNonEdges {
            requested: k,
            available,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut removed = vec![false; m];
    let mut edges = Vec::with_capacity(2 * k);
    for i in index::sample(&mut rng, m, k).into_iter() {
        removed[i] = true;
        let (u, v) = all_edges[i];
        edges.push(LabeledEdge {
            u,
            v,
            label: EdgeLabel::Positive,
        });
    }

    for (u, v) in sample_non_edges(g, k, &mut rng) {
        edges.push(LabeledEdge {
            u,
            v,
            label: EdgeLabel::Negative,
        });
    }

    let kept = all_edges
        .iter()
        .zip(&removed)
        .filter(|(_, &r)| !r)
        .map(|(&e, _)| e);
    let residual = Graph::from_edges_labeled(g.labels().to_vec(), kept);
    Ok((residual, LabeledEdgeSet { edges }))
}

/// Uniform sample of `k` distinct non-edges, as `(u, v)` with `u < v`.
/// Caller guarantees at least `k` exist.
fn sample_non_edges(g: &Graph, k: usize, rng: &mut impl Rng) -> Vec<(usize, usize)> {
    let n = g.node_count();
    let mut chosen = HashSet::with_capacity(k);
    let mut out = Vec::with_capacity(k);
    let mut attempts = 0;
    while out.len() < k && attempts < REJECTION_ATTEMPTS_PER_NEGATIVE * k {
        attempts += 1;
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a == b {
            continue;
        }
        let pair = (a.min(b), a.max(b));
        if g.has_edge(pair.0, pair.1) || !chosen.insert(pair) {
            continue;
        }
        out.push(pair);
    }
    if out.len() < k {
        let remaining: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|&(u, v)| !g.has_edge(u, v) && !chosen.contains(&(u, v)))
            .collect();
        let need = k - out.len();
        for i in index::sample(rng, remaining.len(), need).into_iter() {
            out.push(remaining[i]);
        }
    }
    out
}

/// CSV with header `u,v,label`; label is `1` for positives and `0` for negatives.
pub fn write_labeled_edges(set: &LabeledEdgeSet, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "u,v,label")?;
    for e in &set.edges {
        writeln!(out, "{},{},{}", e.u, e.v, e.label)?;
    }
    Ok(())
}

pub fn read_labeled_edges(input: impl Read) -> Result<LabeledEdgeSet> {
    let fmt = |message: String| Error::Format {
        stage: "prepare",
        message,
    };
    let mut lines = BufReader::new(input).lines();
    match lines.next().transpose().map_err(|e| fmt(e.to_string()))? {
        Some(h) if h.trim() == "u,v,label" => {}
        other => return Err(fmt(format!("expected header u,v,label, found {other:?}"))),
    }
    let mut edges = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.map_err(|e| fmt(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim().split(',').collect();
        let parsed = match fields.as_slice() {
            [u, v, l] => {
                let label = match *l {
                    "1" | "positive" => Some(EdgeLabel::Positive),
                    "0" | "negative" => Some(EdgeLabel::Negative),
                    _ => None,
                };
                u.parse().ok().zip(v.parse().ok()).zip(label)
            }
            _ => None,
        };
        let ((u, v), label) = parsed.ok_or_else(|| fmt(format!("line {}: bad record {line:?}", i + 2)))?;
        edges.push(LabeledEdge { u, v, label });
    }
    Ok(LabeledEdgeSet { edges })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring_with_chords(n: usize) -> Graph {
        let mut edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        edges.extend((0..n).step_by(3).map(|i| (i, (i + n / 2) % n)));
        Graph::from_edges(n, edges)
    }

    #[test]
    fn split_counts() {
        // 100-cycle: |E| = 100
        let g = Graph::from_edges(100, (0..100).map(|i| (i, (i + 1) % 100)));
        assert_eq!(g.edge_count(), 100);
        let (residual, labels) = split_labeled(&g, 0.25, 1).unwrap();
        assert_eq!(labels.n_pos(), 25);
        assert_eq!(labels.n_neg(), 25);
        assert_eq!(residual.edge_count(), 75);
        assert_eq!(residual.node_count(), 100);
    }

    #[test]
    fn complete_graph_has_no_negatives() {
        let g = Graph::from_edges(4, (0..4).flat_map(|u| (u + 1..4).map(move |v| (u, v))));
        assert_eq!(g.edge_count(), 6);
        assert!(matches!(
            split_labeled(&g, 0.25, 0),
            Err(Error::InsufficientNonEdges { requested: 1, available: 0 })
        ));
    }

    #[test]
    fn fraction_bounds() {
        let g = ring_with_chords(20);
        for f in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(split_labeled(&g, f, 0), Err(Error::InvalidParameter(_))));
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let g = ring_with_chords(60);
        let serialize = |seed| {
            let (_, set) = split_labeled(&g, 0.25, seed).unwrap();
            let mut buf = Vec::new();
            write_labeled_edges(&set, &mut buf).unwrap();
            buf
        };
        assert_eq!(serialize(9), serialize(9));
        assert_ne!(serialize(9), serialize(10));
    }

    #[test]
    fn dense_graph_uses_exhaustive_fallback() {
        // K_10 minus three edges: exactly three non-edges.
        let missing = [(0, 1), (2, 5), (7, 9)];
        let g = Graph::from_edges(
            10,
            (0..10)
                .flat_map(|u| (u + 1..10).map(move |v| (u, v)))
                .filter(|e| !missing.contains(e)),
        );
        // floor(0.08 * 42) = 3 negatives needed, all of them.
        let (_, set) = split_labeled(&g, 0.08, 3).unwrap();
        let mut negatives: Vec<_> = set
            .edges
            .iter()
            .filter(|e| !e.label.is_positive())
            .map(|e| (e.u, e.v))
            .collect();
        negatives.sort();
        assert_eq!(negatives, missing);
    }

    #[test]
    fn csv_round_trip() {
        let g = ring_with_chords(30);
        let (_, set) = split_labeled(&g, 0.25, 5).unwrap();
        let mut buf = Vec::new();
        write_labeled_edges(&set, &mut buf).unwrap();
        assert!(buf.starts_with(b"u,v,label\n"));
        assert_eq!(read_labeled_edges(buf.as_slice()).unwrap(), set);
    }
}
