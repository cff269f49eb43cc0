use std::io::{BufRead, BufReader, Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::kernels::{decay_factor, fill_weights, sample_index, WalkState};
use super::{WalkConfig, WalkKind};
use crate::error::{Error, Result};
use crate::graph::io::header_value;
use crate::graph::Graph;

const CORPUS_HEADER: &str = "#corpus v1";

/// Walk sequences, `walks_per_node` per start node, ordered by start node and
/// then replica.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkCorpus {
    pub config: WalkConfig,
    pub sequences: Vec<Vec<u32>>,
}

impl WalkCorpus {
    pub fn token_count(&self) -> usize {
        self.sequences.iter().map(Vec::len).sum()
    }

    pub fn len(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }
}

/// The random stream for one walk. Keyed by (seed, start, replica) only, so
/// walks are reproducible regardless of scheduling, and two kinds sharing a
/// seed consume identical draws.
pub fn walk_rng(seed: u64, start: usize, replica: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((start as u64) << 32) | replica as u64);
    rng
}

/// Single walk of at most `cfg.walk_length` nodes from `start`. A node
/// without neighbours ends the walk early.
pub fn generate_walk(g: &Graph, start: usize, cfg: &WalkConfig, rng: &mut impl Rng) -> Vec<u32> {
    let mut state = WalkState::new(g.node_count(), start);
    let mut weights = Vec::new();
    let mut walk = Vec::with_capacity(cfg.walk_length);
    walk_into(g, &mut state, cfg.kind, cfg.walk_length, rng, &mut weights, &mut walk);
    walk
}

fn walk_into(
    g: &Graph,
    state: &mut WalkState,
    kind: WalkKind,
    length: usize,
    rng: &mut impl Rng,
    weights: &mut Vec<f64>,
    walk: &mut Vec<u32>,
) {
    let decay = decay_factor(kind);
    walk.clear();
    walk.push(state.current as u32);
    while walk.len() < length {
        let neighbors = g.neighbors(state.current);
        if neighbors.is_empty() {
            break;
        }
        let total = fill_weights(g, state, kind, decay, weights);
        let next = neighbors[sample_index(weights, total, rng.gen::<f64>())];
        state.advance(next);
        walk.push(next as u32);
    }
}

/// Runs `walks_per_node` walks from every node, in parallel on the current
/// rayon pool. Output order and content do not depend on the thread count.
pub fn generate_corpus(g: &Graph, cfg: &WalkConfig) -> WalkCorpus {
    let n = g.node_count();
    let beta = cfg.walks_per_node;
    let sequences = (0..n)
        .into_par_iter()
        .flat_map_iter(|start| {
            let mut state = WalkState::new(n, start);
            let mut weights = Vec::new();
            (0..beta)
                .map(|replica| {
                    let mut rng = walk_rng(cfg.seed, start, replica);
                    state.restart(start);
                    let mut walk = Vec::with_capacity(cfg.walk_length);
                    walk_into(g, &mut state, cfg.kind, cfg.walk_length, &mut rng, &mut weights, &mut walk);
                    walk
                })
                .collect::<Vec<_>>()
        })
        .collect();
    WalkCorpus {
        config: *cfg,
        sequences,
    }
}

/// Header line recording the walk parameters, then one walk per line as
/// space-separated node indexes.
pub fn write_corpus(corpus: &WalkCorpus, mut out: impl Write) -> std::io::Result<()> {
    let cfg = &corpus.config;
    writeln!(
        out,
        "{CORPUS_HEADER} {} beta={} alpha={} seed={}",
        cfg.kind.header_fragment(),
        cfg.walks_per_node,
        cfg.walk_length,
        cfg.seed
    )?;
    let mut line = String::new();
    for seq in &corpus.sequences {
        line.clear();
        for (i, node) in seq.iter().enumerate() {
            if i > 0 {
                line.push(' ');
            }
            line.push_str(&node.to_string());
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn read_corpus(input: impl Read) -> Result<WalkCorpus> {
    let fmt = |message: String| Error::Format { stage: "walk", message };
    let mut lines = BufReader::new(input).lines();
    let header = lines
        .next()
        .transpose()
        .map_err(|e| fmt(e.to_string()))?
        .ok_or_else(|| fmt("missing header".into()))?;
    let rest = header
        .strip_prefix(CORPUS_HEADER)
        .ok_or_else(|| fmt(format!("unsupported corpus header {header:?}")))?;
    let config = parse_header(rest).ok_or_else(|| fmt(format!("bad corpus header {header:?}")))?;
    let mut sequences = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.map_err(|e| fmt(e.to_string()))?;
        let seq = line
            .split_whitespace()
            .map(str::parse::<u32>)
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| fmt(format!("line {}: bad node index", i + 2)))?;
        if seq.is_empty() {
            return Err(fmt(format!("line {}: empty walk", i + 2)));
        }
        sequences.push(seq);
    }
    Ok(WalkCorpus { config, sequences })
}

fn parse_header(rest: &str) -> Option<WalkConfig> {
    let kind_name = rest.split_whitespace().next()?;
    let kind = match kind_name {
        "rw" => WalkKind::Rw,
        "dg" => WalkKind::Dg,
        "id" => WalkKind::Id,
        "tsaw" => WalkKind::Tsaw {
            lambda: header_value(rest, "lambda")?,
        },
        "n2v" => WalkKind::Node2Vec {
            p: header_value(rest, "p")?,
            q: header_value(rest, "q")?,
        },
        _ => return None,
    };
    Some(WalkConfig {
        kind,
        walks_per_node: header_value(rest, "beta")?,
        walk_length: header_value(rest, "alpha")?,
        seed: header_value(rest, "seed")?,
    })
}
