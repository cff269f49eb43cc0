use std::io::{BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize};

use super::metrics::cosine;
use crate::error::{Error, Result};
use crate::graph::LabeledEdgeSet;
use crate::sgns::EmbeddingMatrix;

const SCORE_HEADER: &str = "#scores v1";

/// One similarity score per labeled edge, in labeled-set order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreVector {
    pub walk: String,
    pub scores: Vec<f64>,
    pub normalized: bool,
    /// Edges whose cosine was undefined because an endpoint had a zero
    /// embedding; they carry the minimum defined score.
    pub undefined: usize,
}

/// Raw cosine similarity of every labeled pair's embeddings.
pub fn score_edges(emb: &EmbeddingMatrix<f32>, labels: &LabeledEdgeSet, walk: &str) -> Result<ScoreVector> {
    let rows = emb.rows();
    let mut scores = Vec::with_capacity(labels.len());
    for e in &labels.edges {
        for node in [e.u, e.v] {
            if node >= rows {
                return Err(Error::MissingNode { node, len: rows });
            }
        }
        scores.push(match cosine(emb.row(e.u), emb.row(e.v)) {
            Ok(s) => Some(s),
            Err(Error::ZeroVector) => None,
            Err(other) => return Err(other),
        });
    }
    let undefined = scores.iter().filter(|s| s.is_none()).count();
    let floor = scores.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    let floor = if floor.is_finite() { floor } else { 0.0 };
    if undefined > 0 {
        log::warn!("{walk}: {undefined} labeled edges touch a zero embedding; scored at the minimum");
    }
    Ok(ScoreVector {
        walk: walk.to_owned(),
        scores: scores.into_iter().map(|s| s.unwrap_or(floor)).collect(),
        normalized: false,
        undefined,
    })
}

/// Min-max scaling onto [0, 1]; a constant vector maps to 0.5 everywhere.
pub fn minmax_normalize(s: &ScoreVector) -> ScoreVector {
    let min = s.scores.iter().copied().fold(f64::INFINITY, f64::min);
    let max = s.scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = max - min;
    let scores = s
        .scores
        .iter()
        .map(|&x| if range > 0.0 { ((x - min) / range).clamp(0.0, 1.0) } else { 0.5 })
        .collect();
    ScoreVector {
        scores,
        normalized: true,
        ..s.clone()
    }
}

/// `#scores v1 normalized=<bool> undefined=<n> walk=<name>` then one score
/// per line. The walk name runs to the end of the header line. Scores use
/// shortest round-trip formatting.
pub fn write_scores(s: &ScoreVector, mut out: impl Write) -> std::io::Result<()> {
    writeln!(
        out,
        "{SCORE_HEADER} normalized={} undefined={} walk={}",
        s.normalized, s.undefined, s.walk
    )?;
    for x in &s.scores {
        writeln!(out, "{x}")?;
    }
    Ok(())
}

pub fn read_scores(input: impl Read) -> Result<ScoreVector> {
    let fmt = |message: String| Error::Format { stage: "score", message };
    let mut lines = BufReader::new(input).lines();
    let header = lines
        .next()
        .transpose()
        .map_err(|e| fmt(e.to_string()))?
        .ok_or_else(|| fmt("missing header".into()))?;
    let rest = header
        .strip_prefix(SCORE_HEADER)
        .ok_or_else(|| fmt(format!("unsupported score header {header:?}")))?;
    let (rest, walk) = rest
        .split_once(" walk=")
        .ok_or_else(|| fmt("header lacks walk=".into()))?;
    let walk = walk.to_owned();
    let field = |key: &str| {
        rest.split_whitespace()
            .filter_map(|kv| kv.split_once('='))
            .find(|(k, _)| *k == key)
            .map(|(_, v)| v.to_owned())
            .ok_or_else(|| fmt(format!("header lacks {key}=")))
    };
    let normalized = field("normalized")?.parse().map_err(|_| fmt("bad normalized flag".into()))?;
    let undefined = field("undefined")?.parse().map_err(|_| fmt("bad undefined count".into()))?;
    let mut scores = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.map_err(|e| fmt(e.to_string()))?;
        let x: f64 = line
            .trim()
            .parse()
            .map_err(|_| fmt(format!("line {}: bad score {line:?}", i + 2)))?;
        scores.push(x);
    }
    Ok(ScoreVector {
        walk,
        scores,
        normalized,
        undefined,
    })
}
