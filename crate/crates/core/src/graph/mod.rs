//! Undirected simple graphs in compressed adjacency form, plus the
//! preprocessing steps that turn a raw edge list into a residual training
//! graph and a labeled link-prediction dataset.

pub(crate) mod io;
mod split;

pub use io::{load_edge_list, read_graph, read_node_map, write_graph, write_node_map, RawEdges};
pub use split::{read_labeled_edges, split_labeled, write_labeled_edges, EdgeLabel, LabeledEdge, LabeledEdgeSet};

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Immutable undirected simple graph.
///
/// Adjacency is stored CSR style: the neighbours of `u` are
/// `neighbors[offsets[u]..offsets[u + 1]]`, sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    labels: Vec<String>,
}

impl Graph {
    /// Builds a graph on `n` nodes from arbitrary pairs. Self-loops are
    /// dropped and duplicates (in either orientation) collapsed. Nodes are
    /// labeled by their index.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let labels = (0..n).map(|i| i.to_string()).collect();
        Self::from_edges_labeled(labels, edges)
    }

    pub(crate) fn from_edges_labeled(
        labels: Vec<String>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Self {
        let n = labels.len();
        let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (u, v) in edges {
            assert!(u < n && v < n, "edge ({u}, {v}) out of range for {n} nodes");
            if u == v {
                continue;
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut neighbors = Vec::new();
        offsets.push(0);
        for mut list in adjacency {
            list.sort_unstable();
            list.dedup();
            neighbors.extend_from_slice(&list);
            offsets.push(neighbors.len());
        }
        Graph {
            offsets,
            neighbors,
            labels,
        }
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    #[inline]
    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    #[inline]
    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.neighbors[self.offsets[u]..self.offsets[u + 1]]
    }

    /// O(log deg) membership test.
    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    /// Original label of each node.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, u: usize) -> &str {
        &self.labels[u]
    }

    /// Verifies symmetry, absence of self-loops and sorted, duplicate-free
    /// adjacency lists.
    pub fn is_well_formed(&self) -> bool {
        (0..self.node_count()).all(|u| {
            let list = self.neighbors(u);
            list.windows(2).all(|w| w[0] < w[1])
                && list.iter().all(|&v| v != u && v < self.node_count() && self.has_edge(v, u))
        })
    }

    /// Component id per node (ids assigned in order of smallest member) and
    /// the component sizes.
    pub fn components(&self) -> (Vec<usize>, Vec<usize>) {
        let n = self.node_count();
        let mut component = vec![usize::MAX; n];
        let mut sizes = Vec::new();
        let mut queue = VecDeque::new();
        for root in 0..n {
            if component[root] != usize::MAX {
                continue;
            }
            let id = sizes.len();
            component[root] = id;
            queue.push_back(root);
            let mut size = 0;
            while let Some(u) = queue.pop_front() {
                size += 1;
                for &v in self.neighbors(u) {
                    if component[v] == usize::MAX {
                        component[v] = id;
                        queue.push_back(v);
                    }
                }
            }
            sizes.push(size);
        }
        (component, sizes)
    }

    /// Induced subgraph on `keep` (must be sorted), reindexed densely in order.
    fn induced(&self, keep: &[usize]) -> Graph {
        let mut new_index = vec![usize::MAX; self.node_count()];
        for (i, &u) in keep.iter().enumerate() {
            new_index[u] = i;
        }
        let labels = keep.iter().map(|&u| self.labels[u].clone()).collect();
        let edges = self
            .edges()
            .filter(|&(u, v)| new_index[u] != usize::MAX && new_index[v] != usize::MAX)
            .map(|(u, v)| (new_index[u], new_index[v]))
            .collect::<Vec<_>>();
        Graph::from_edges_labeled(labels, edges)
    }
}

/// Canonicalizes raw pairs into an undirected simple graph.
pub fn build_graph(raw: &RawEdges) -> Result<Graph> {
    if raw.pairs.is_empty() {
        return Err(Error::EmptyInput("edge list"));
    }
    let graph = Graph::from_edges_labeled(raw.labels.clone(), raw.pairs.iter().copied());
    if graph.edge_count() == 0 {
        return Err(Error::NoEdges);
    }
    Ok(graph)
}

/// Induced subgraph on the largest connected component. Among components of
/// equal size the one containing the smallest node index wins.
pub fn largest_component(g: &Graph) -> Graph {
    let (component, sizes) = g.components();
    let Some(best) = sizes
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .map(|(id, _)| id)
    else {
        return g.clone();
    };
    let keep: Vec<usize> = (0..g.node_count()).filter(|&u| component[u] == best).collect();
    g.induced(&keep)
}
