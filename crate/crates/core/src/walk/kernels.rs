//! Transition kernels.
//!
//! Each kernel assigns a nonnegative weight to every neighbour of the current
//! node; the transition probability is the weight over the sum of weights.
//!
//! | kind | weight of neighbour `v` |
//! |------|-------------------------|
//! | RW   | `1` |
//! | DG   | `deg(v)` |
//! | ID   | `1 / deg(v)` |
//! | TSAW | `exp(-lambda)^visits(v)` |
//! | N2V  | `1/p` if `v` is the previous node, `1` if `v` neighbours it, `1/q` otherwise |

use rand::Rng;

use super::WalkKind;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Per-walk visit counts over a dense node range. Clearing touches only the
/// entries that were set.
#[derive(Debug, Clone, Default)]
pub struct VisitCounts {
    counts: Vec<u32>,
    touched: Vec<usize>,
}

impl VisitCounts {
    pub fn new(n: usize) -> Self {
        VisitCounts {
            counts: vec![0; n],
            touched: Vec::new(),
        }
    }

    #[inline]
    pub fn get(&self, node: usize) -> u32 {
        self.counts[node]
    }

    #[inline]
    pub fn record(&mut self, node: usize) {
        if self.counts[node] == 0 {
            self.touched.push(node);
        }
        self.counts[node] += 1;
    }

    pub fn clear(&mut self) {
        for &node in &self.touched {
            self.counts[node] = 0;
        }
        self.touched.clear();
    }

    pub fn set(&mut self, node: usize, count: u32) {
        if self.counts[node] == 0 && count > 0 {
            self.touched.push(node);
        }
        self.counts[node] = count;
    }
}

/// Position and memory of a walk in progress.
#[derive(Debug, Clone)]
pub struct WalkState {
    pub current: usize,
    /// Absent on the first step.
    pub previous: Option<usize>,
    pub visits: VisitCounts,
}

impl WalkState {
    /// Fresh state at `start`, which counts as visited once.
    pub fn new(n: usize, start: usize) -> Self {
        let mut visits = VisitCounts::new(n);
        visits.record(start);
        WalkState {
            current: start,
            previous: None,
            visits,
        }
    }

    pub fn restart(&mut self, start: usize) {
        self.visits.clear();
        self.visits.record(start);
        self.current = start;
        self.previous = None;
    }

    pub fn advance(&mut self, next: usize) {
        self.previous = Some(self.current);
        self.current = next;
        self.visits.record(next);
    }
}

/// Fills `out` with the unnormalized weights of `kind` over the neighbours of
/// `state.current`, in adjacency order. Returns the weight sum.
pub(crate) fn fill_weights(g: &Graph, state: &WalkState, kind: WalkKind, decay: f64, out: &mut Vec<f64>) -> f64 {
    let neighbors = g.neighbors(state.current);
    out.clear();
    match kind {
        WalkKind::Rw => out.extend(neighbors.iter().map(|_| 1.0)),
        WalkKind::Dg => out.extend(neighbors.iter().map(|&v| g.degree(v) as f64)),
        WalkKind::Id => out.extend(neighbors.iter().map(|&v| 1.0 / g.degree(v) as f64)),
        WalkKind::Tsaw { .. } => out.extend(
            neighbors
                .iter()
                .map(|&v| decay.powi(state.visits.get(v) as i32)),
        ),
        WalkKind::Node2Vec { p, q } => match state.previous {
            None => out.extend(neighbors.iter().map(|_| 1.0)),
            Some(prev) => out.extend(neighbors.iter().map(|&x| {
                if x == prev {
                    1.0 / p
                } else if g.has_edge(prev, x) {
                    1.0
                } else {
                    1.0 / q
                }
            })),
        },
    }
    out.iter().sum()
}

/// Decay factor per visit for TSAW (`exp(-lambda)`); unused by other kinds.
pub(crate) fn decay_factor(kind: WalkKind) -> f64 {
    match kind {
        WalkKind::Tsaw { lambda } => (-lambda).exp(),
        _ => 1.0,
    }
}

fn probabilities(g: &Graph, state: &WalkState, kind: WalkKind) -> Result<Vec<f64>> {
    if g.degree(state.current) == 0 {
        return Err(Error::DeadEnd { node: state.current });
    }
    let mut w = Vec::with_capacity(g.degree(state.current));
    let total = fill_weights(g, state, kind, decay_factor(kind), &mut w);
    for x in &mut w {
        *x /= total;
    }
    Ok(w)
}

/// Uniform: `1 / deg(u)` for every neighbour.
pub fn rw_weights(g: &Graph, u: usize) -> Result<Vec<f64>> {
    probabilities(g, &WalkState::new(g.node_count(), u), WalkKind::Rw)
}

/// Proportional to neighbour degree.
pub fn dg_weights(g: &Graph, u: usize) -> Result<Vec<f64>> {
    probabilities(g, &WalkState::new(g.node_count(), u), WalkKind::Dg)
}

/// Proportional to inverse neighbour degree.
pub fn id_weights(g: &Graph, u: usize) -> Result<Vec<f64>> {
    probabilities(g, &WalkState::new(g.node_count(), u), WalkKind::Id)
}

/// True self-avoiding walk: a neighbour visited `f` times gets weight
/// `exp(-lambda * f)`.
pub fn tsaw_weights(g: &Graph, state: &WalkState, lambda: f64) -> Result<Vec<f64>> {
    probabilities(g, state, WalkKind::Tsaw { lambda })
}

/// node2vec second-order weights; uniform when there is no previous node.
pub fn n2v_weights(g: &Graph, state: &WalkState, p: f64, q: f64) -> Result<Vec<f64>> {
    probabilities(g, state, WalkKind::Node2Vec { p, q })
}

/// Draws an index with probability proportional to `weights[j]`.
pub fn sample_step(weights: &[f64], rng: &mut impl Rng) -> Result<usize> {
    if weights.is_empty() {
        return Err(Error::InvalidParameter("empty weight vector".into()));
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::NonFinite("transition weights"));
    }
    let total: f64 = weights.iter().sum();
    Ok(sample_index(weights, total, rng.gen::<f64>()))
}

/// Inverse-CDF lookup of `draw` in `[0, 1)` against unnormalized weights.
/// Rounding at the top end falls back to the last positive weight.
#[inline]
pub(crate) fn sample_index(weights: &[f64], total: f64, draw: f64) -> usize {
    let target = draw * total;
    let mut acc = 0.0;
    for (j, &w) in weights.iter().enumerate() {
        acc += w;
        if target < acc {
            return j;
        }
    }
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(weights.len() - 1)
}
