use std::collections::HashMap;
use std::io::{BufRead, BufReader, Read, Write};

use super::Graph;
use crate::error::{Error, Result};

const GRAPH_HEADER: &str = "#graph v1";

/// Edge pairs as read from a text edge list, with labels reindexed densely in
/// first-appearance order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawEdges {
    pub pairs: Vec<(usize, usize)>,
    /// Label of each dense index.
    pub labels: Vec<String>,
    pub label_map: HashMap<String, usize>,
}

impl RawEdges {
    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    fn intern(&mut self, label: &str) -> usize {
        if let Some(&i) = self.label_map.get(label) {
            return i;
        }
        let i = self.labels.len();
        self.labels.push(label.to_owned());
        self.label_map.insert(label.to_owned(), i);
        i
    }

    pub fn pair_labels(&self) -> impl Iterator<Item = (&str, &str)> {
        self.pairs
            .iter()
            .map(|&(u, v)| (self.labels[u].as_str(), self.labels[v].as_str()))
    }
}

/// Reads a whitespace-separated edge list, one pair per line. Blank lines and
/// lines starting with `#` are skipped.
pub fn load_edge_list(input: impl Read) -> Result<RawEdges> {
    let mut raw = RawEdges::default();
    for (i, line) in BufReader::new(input).lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 2 tokens, found {}", tokens.len()),
            });
        }
        let u = raw.intern(tokens[0]);
        let v = raw.intern(tokens[1]);
        raw.pairs.push((u, v));
    }
    if raw.pairs.is_empty() {
        return Err(Error::EmptyInput("edge list"));
    }
    Ok(raw)
}

/// Writes the graph as dense index pairs with a header carrying the node
/// count, so isolated nodes survive a round trip.
pub fn write_graph(g: &Graph, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "{GRAPH_HEADER} nodes={} edges={}", g.node_count(), g.edge_count())?;
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}

/// Reads a graph written by [`write_graph`]. Labels default to indices; use
/// [`read_node_map`] to restore the originals.
pub fn read_graph(input: impl Read) -> Result<Graph> {
    let fmt = |message: String| Error::Format {
        stage: "prepare",
        message,
    };
    let mut lines = BufReader::new(input).lines();
    let header = lines
        .next()
        .transpose()
        .map_err(|e| fmt(e.to_string()))?
        .ok_or_else(|| fmt("missing header".into()))?;
    let rest = header
        .strip_prefix(GRAPH_HEADER)
        .ok_or_else(|| fmt(format!("unsupported graph header {header:?}")))?;
    let n = header_value(rest, "nodes").ok_or_else(|| fmt("header lacks nodes=".into()))?;
    let mut edges = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.map_err(|e| fmt(e.to_string()))?;
        let mut it = line.split_whitespace();
        let parsed = match (it.next(), it.next(), it.next()) {
            (Some(a), Some(b), None) => a.parse::<usize>().ok().zip(b.parse::<usize>().ok()),
            _ => None,
        };
        match parsed {
            Some((u, v)) if u < n && v < n => edges.push((u, v)),
            _ => return Err(fmt(format!("line {}: bad edge {line:?}", i + 2))),
        }
    }
    Ok(Graph::from_edges(n, edges))
}

pub(crate) fn header_value<T: std::str::FromStr>(rest: &str, key: &str) -> Option<T> {
    rest.split_whitespace()
        .filter_map(|kv| kv.split_once('='))
        .find(|(k, _)| *k == key)
        .and_then(|(_, v)| v.parse().ok())
}

/// One `label<TAB>index` line per node.
pub fn write_node_map(g: &Graph, mut out: impl Write) -> std::io::Result<()> {
    for (i, label) in g.labels().iter().enumerate() {
        writeln!(out, "{label}\t{i}")?;
    }
    Ok(())
}

/// Reads a node-map sidecar into a label per dense index.
pub fn read_node_map(input: impl Read) -> Result<Vec<String>> {
    let mut entries = Vec::new();
    for (i, line) in BufReader::new(input).lines().enumerate() {
        let line = line.map_err(|e| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        if line.is_empty() {
            continue;
        }
        let (label, index) = line
            .rsplit_once('\t')
            .and_then(|(l, idx)| idx.parse::<usize>().ok().map(|idx| (l.to_owned(), idx)))
            .ok_or_else(|| Error::Parse {
                line: i + 1,
                message: "expected label<TAB>index".into(),
            })?;
        entries.push((index, label));
    }
    entries.sort();
    if entries.iter().enumerate().any(|(i, (idx, _))| i != *idx) {
        return Err(Error::Format {
            stage: "prepare",
            message: "node map indexes are not a dense range".into(),
        });
    }
    Ok(entries.into_iter().map(|(_, l)| l).collect())
}

impl Graph {
    /// Replaces node labels, e.g. with those read from a node-map sidecar.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Graph> {
        if labels.len() != self.node_count() {
            return Err(Error::LengthMismatch(labels.len(), self.node_count()));
        }
        self.labels = labels;
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_numeric_pairs() {
        let raw = load_edge_list("0 1\n1 2\n".as_bytes()).unwrap();
        assert_eq!(raw.node_count(), 3);
        assert_eq!(raw.pairs, vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn skips_comments() {
        let raw = load_edge_list("a b\n# c\nb a\n".as_bytes()).unwrap();
        assert_eq!(raw.node_count(), 2);
        assert_eq!(raw.pair_labels().collect::<Vec<_>>(), vec![("a", "b"), ("b", "a")]);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        match load_edge_list("x\n".as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("unexpected {other:?}"),
        }
        match load_edge_list("0 1\n\n1 2 3\n".as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(load_edge_list("".as_bytes()), Err(Error::EmptyInput(_))));
        assert!(matches!(load_edge_list("# only\n".as_bytes()), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn graph_artifact_keeps_isolated_nodes() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2)]);
        let mut buf = Vec::new();
        write_graph(&g, &mut buf).unwrap();
        let back = read_graph(buf.as_slice()).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.node_count(), 5);
    }

    #[test]
    fn node_map_round_trip() {
        let raw = load_edge_list("alice bob\nbob carol\n".as_bytes()).unwrap();
        let g = super::super::build_graph(&raw).unwrap();
        let mut buf = Vec::new();
        write_node_map(&g, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "alice\t0\nbob\t1\ncarol\t2\n");
        assert_eq!(read_node_map(buf.as_slice()).unwrap(), vec!["alice", "bob", "carol"]);
    }
}
