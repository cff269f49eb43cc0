//! Biased random walks and the corpora they produce.
//!
//! Every kernel is a transition weight over the neighbours of the current
//! node, normalized into a probability vector and sampled by inverse CDF.
//! See [`kernels`] for the individual weightings.

mod corpus;
pub mod kernels;

pub use corpus::{generate_corpus, generate_walk, read_corpus, walk_rng, write_corpus, WalkCorpus};
pub use kernels::{
    dg_weights, id_weights, n2v_weights, rw_weights, sample_step, tsaw_weights, VisitCounts, WalkState,
};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub const DEFAULT_WALKS_PER_NODE: usize = 40;
pub const DEFAULT_WALK_LENGTH: usize = 200;
pub const DEFAULT_TSAW_DECAY: f64 = std::f64::consts::LN_2;

/// Transition bias of a walk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WalkKind {
    /// Uniform over neighbours.
    Rw,
    /// Proportional to neighbour degree.
    Dg,
    /// Proportional to inverse neighbour degree.
    Id,
    /// True self-avoiding walk: weight `exp(-lambda * visits)`.
    Tsaw { lambda: f64 },
    /// node2vec second-order walk with return parameter `p` and in-out parameter `q`.
    Node2Vec { p: f64, q: f64 },
}

impl WalkKind {
    pub fn tsaw() -> Self {
        WalkKind::Tsaw {
            lambda: DEFAULT_TSAW_DECAY,
        }
    }

    pub fn n2v(p: f64, q: f64) -> Self {
        WalkKind::Node2Vec { p, q }
    }

    /// The nine walks compared in the benchmark, in canonical order.
    pub fn benchmark_set() -> Vec<WalkKind> {
        vec![
            WalkKind::Rw,
            WalkKind::Dg,
            WalkKind::Id,
            WalkKind::tsaw(),
            WalkKind::n2v(1.0, 1.0),
            WalkKind::n2v(1.5, 0.5),
            WalkKind::n2v(0.5, 1.5),
            WalkKind::n2v(2.0, 1.5),
            WalkKind::n2v(0.25, 0.5),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, x: f64| {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must be positive, got {x}")))
            }
        };
        match *self {
            WalkKind::Tsaw { lambda } => positive("lambda", lambda),
            WalkKind::Node2Vec { p, q } => positive("p", p).and(positive("q", q)),
            _ => Ok(()),
        }
    }

    /// Parameter fragment recorded in corpus headers, e.g. `n2v p=1.5 q=0.5`.
    pub fn header_fragment(&self) -> String {
        match *self {
            WalkKind::Rw => "rw".into(),
            WalkKind::Dg => "dg".into(),
            WalkKind::Id => "id".into(),
            WalkKind::Tsaw { lambda } => format!("tsaw lambda={lambda}"),
            WalkKind::Node2Vec { p, q } => format!("n2v p={p} q={q}"),
        }
    }

    /// File-system friendly name, e.g. `n2v_1.5_0.5`.
    pub fn slug(&self) -> String {
        match *self {
            WalkKind::Rw => "rw".into(),
            WalkKind::Dg => "dg".into(),
            WalkKind::Id => "id".into(),
            WalkKind::Tsaw { lambda } if lambda == DEFAULT_TSAW_DECAY => "tsaw".into(),
            WalkKind::Tsaw { lambda } => format!("tsaw_{lambda}"),
            WalkKind::Node2Vec { p, q } => format!("n2v_{p}_{q}"),
        }
    }
}

fn fmt_param(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{x:.1}").trim_end_matches(".0").to_owned()
    } else {
        x.to_string()
    }
}

impl fmt::Display for WalkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            WalkKind::Rw => f.write_str("RW"),
            WalkKind::Dg => f.write_str("DG"),
            WalkKind::Id => f.write_str("ID"),
            WalkKind::Tsaw { lambda } if lambda == DEFAULT_TSAW_DECAY => f.write_str("TSAW"),
            WalkKind::Tsaw { lambda } => write!(f, "TSAW({})", fmt_param(lambda)),
            WalkKind::Node2Vec { p, q } => {
                // 2.0 keeps its decimal, 1 does not; matches the usual table labels.
                let show = |x: f64| if x == 2.0 { "2.0".to_owned() } else { fmt_param(x) };
                write!(f, "N2V({}, {})", show(p), show(q))
            }
        }
    }
}

impl FromStr for WalkKind {
    type Err = Error;

    /// Accepts display names (`N2V(1.5, 0.5)`, `TSAW`), slugs (`n2v_1.5_0.5`)
    /// and colon forms (`n2v:1.5,0.5`, `tsaw:0.5`), case-insensitively.
    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::Config(format!("unknown walk {s:?}"));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
        let (name, args) = if let Some(open) = compact.find('(') {
            let inner = compact[open + 1..].strip_suffix(')').ok_or_else(unknown)?;
            (&compact[..open], Some(inner.replace(',', " ")))
        } else if let Some((name, rest)) = compact.split_once(':') {
            (name, Some(rest.replace(',', " ")))
        } else if let Some((name, rest)) = compact.split_once('_') {
            (name, Some(rest.replace('_', " ")))
        } else {
            (compact.as_str(), None)
        };
        let params: Vec<f64> = match &args {
            Some(a) => a
                .split_whitespace()
                .map(|x| x.parse::<f64>().map_err(|_| unknown()))
                .collect::<Result<_>>()?,
            None => Vec::new(),
        };
        let kind = match (name, params.as_slice()) {
            ("rw", []) => WalkKind::Rw,
            ("dg", []) => WalkKind::Dg,
            ("id", []) => WalkKind::Id,
            ("tsaw", []) => WalkKind::tsaw(),
            ("tsaw", [lambda]) => WalkKind::Tsaw { lambda: *lambda },
            ("n2v" | "node2vec", [p, q]) => WalkKind::Node2Vec { p: *p, q: *q },
            _ => return Err(unknown()),
        };
        kind.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(kind)
    }
}

impl Serialize for WalkKind {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for WalkKind {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Everything needed to reproduce a corpus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkConfig {
    pub kind: WalkKind,
    /// Walks started from every node.
    pub walks_per_node: usize,
    /// Maximum walk length, in nodes.
    pub walk_length: usize,
    pub seed: u64,
}

impl WalkConfig {
    pub fn new(kind: WalkKind, seed: u64) -> Self {
        WalkConfig {
            kind,
            walks_per_node: DEFAULT_WALKS_PER_NODE,
            walk_length: DEFAULT_WALK_LENGTH,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.walks_per_node == 0 || self.walk_length == 0 {
            return Err(Error::InvalidParameter(
                "walks per node and walk length must be at least 1".into(),
            ));
        }
        self.kind.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_names() {
        let names: Vec<String> = WalkKind::benchmark_set().iter().map(|k| k.to_string()).collect();
        assert_eq!(
            names,
            [
                "RW",
                "DG",
                "ID",
                "TSAW",
                "N2V(1, 1)",
                "N2V(1.5, 0.5)",
                "N2V(0.5, 1.5)",
                "N2V(2.0, 1.5)",
                "N2V(0.25, 0.5)"
            ]
        );
    }

    #[test]
    fn parse_round_trips() {
        for kind in WalkKind::benchmark_set() {
            assert_eq!(kind.to_string().parse::<WalkKind>().unwrap(), kind);
            assert_eq!(kind.slug().parse::<WalkKind>().unwrap(), kind);
        }
        assert_eq!("n2v:1.5,0.5".parse::<WalkKind>().unwrap(), WalkKind::n2v(1.5, 0.5));
        assert_eq!("tsaw(0.5)".parse::<WalkKind>().unwrap(), WalkKind::Tsaw { lambda: 0.5 });
    }

    #[test]
    fn rejects_unknown_and_invalid() {
        for bad in ["levy", "rw(1)", "n2v(1)", "n2v(0, 1)", "tsaw(-1)", "N2V(1, x)"] {
            assert!(bad.parse::<WalkKind>().is_err(), "{bad}");
        }
    }

    #[test]
    fn tsaw_header_records_ln2() {
        assert_eq!(WalkKind::tsaw().header_fragment(), "tsaw lambda=0.6931471805599453");
    }
}
