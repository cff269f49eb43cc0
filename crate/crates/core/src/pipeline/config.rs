use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sgns::{TrainConfig, TrainMode};
use crate::walk::{WalkKind, DEFAULT_WALKS_PER_NODE, DEFAULT_WALK_LENGTH};

pub const DEFAULT_SPLIT_FRACTION: f64 = 0.25;

/// Full description of one benchmark run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    /// Edge-list paths or manifest names.
    pub graphs: Vec<String>,
    pub walks: Vec<WalkKind>,
    pub walks_per_node: usize,
    pub walk_length: usize,
    pub split_fraction: f64,
    /// `train.seed` is ignored; each (graph, walk) derives its own.
    pub train: TrainConfig,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    /// Worker threads for graph/walk tasks; 0 uses every core.
    pub threads: usize,
    pub manifest: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            graphs: Vec::new(),
            walks: WalkKind::benchmark_set(),
            walks_per_node: DEFAULT_WALKS_PER_NODE,
            walk_length: DEFAULT_WALK_LENGTH,
            split_fraction: DEFAULT_SPLIT_FRACTION,
            train: TrainConfig::default(),
            master_seed: 0,
            output_dir: PathBuf::from("out"),
            threads: 0,
            manifest: None,
            cache_dir: None,
        }
    }
}

impl ExperimentConfig {
    /// Checks every parameter. Run before any computation so that a bad
    /// config fails fast.
    pub fn validate(&self) -> Result<()> {
        let cfg = |m: String| Err(Error::Config(m));
        if self.graphs.is_empty() {
            return cfg("no graphs given".into());
        }
        if self.walks.is_empty() {
            return cfg("walk list is empty".into());
        }
        for w in &self.walks {
            w.validate().map_err(|e| Error::Config(format!("walk {w}: {e}")))?;
        }
        let mut names: Vec<String> = self.walks.iter().map(|w| w.to_string()).collect();
        names.sort();
        if names.windows(2).any(|p| p[0] == p[1]) {
            return cfg("walk list contains duplicates".into());
        }
        if self.walks_per_node == 0 || self.walk_length == 0 {
            return cfg("walks_per_node and walk_length must be at least 1".into());
        }
        if !(self.split_fraction > 0.0 && self.split_fraction < 1.0) {
            return cfg(format!("split_fraction {} is outside (0, 1)", self.split_fraction));
        }
        self.train.validate().map_err(|e| Error::Config(e.to_string()))?;
        let mut stems: Vec<String> = self.graphs.iter().map(|g| graph_name(g)).collect();
        stems.sort();
        if stems.windows(2).any(|p| p[0] == p[1]) {
            return cfg("two graphs map to the same name".into());
        }
        Ok(())
    }

    /// Parses the key-value config format. See [`ExperimentConfig::apply`]
    /// for the keys.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split_once('#').map_or(raw, |(a, _)| a).trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            cfg.apply(key.trim(), value.trim())
                .map_err(|e| Error::Config(format!("line {}: {}", i + 1, strip_config(e))))?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }

    /// Sets one key. Lists are comma-separated; commas inside parentheses
    /// belong to the item, so `walks = RW, N2V(1.5, 0.5)` has two entries.
    ///
    /// Keys: `graphs`, `walks`, `walks_per_node`, `walk_length`,
    /// `split_fraction`, `dim`, `window`, `negatives`, `epochs`, `lr_start`,
    /// `lr_end`, `noise_power`, `master_seed`, `output_dir`, `threads`,
    /// `mode` (`deterministic` or `async`), `train_threads`, `manifest`,
    /// `cache_dir`.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse().map_err(|_| Error::Config(format!("{key}: cannot parse {v:?}")))
        }
        match key {
            "graphs" => self.graphs = split_list(value).into_iter().map(str::to_owned).collect(),
            "walks" => {
                self.walks = split_list(value)
                    .into_iter()
                    .map(str::parse)
                    .collect::<Result<_>>()?
            }
            "walks_per_node" => self.walks_per_node = num(key, value)?,
            "walk_length" => self.walk_length = num(key, value)?,
            "split_fraction" => self.split_fraction = num(key, value)?,
            "dim" => self.train.dim = num(key, value)?,
            "window" => self.train.window = num(key, value)?,
            "negatives" => self.train.negatives = num(key, value)?,
            "epochs" => self.train.epochs = num(key, value)?,
            "lr_start" => self.train.lr_start = num(key, value)?,
            "lr_end" => self.train.lr_end = num(key, value)?,
            "noise_power" => self.train.noise_power = num(key, value)?,
            "master_seed" => self.master_seed = num(key, value)?,
            "output_dir" => self.output_dir = PathBuf::from(value),
            "threads" => self.threads = num(key, value)?,
            "mode" => {
                self.train.mode = match value.to_ascii_lowercase().as_str() {
                    "deterministic" => TrainMode::Deterministic,
                    "async" => TrainMode::Async {
                        threads: match self.train.mode {
                            TrainMode::Async { threads } => threads,
                            TrainMode::Deterministic => default_threads(),
                        },
                    },
                    _ => return Err(Error::Config(format!("mode: expected deterministic or async, got {value:?}"))),
                }
            }
            "train_threads" => {
                self.train.mode = TrainMode::Async {
                    threads: num(key, value)?,
                }
            }
            "manifest" => self.manifest = Some(PathBuf::from(value)),
            "cache_dir" => self.cache_dir = Some(PathBuf::from(value)),
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }
}

fn strip_config(e: Error) -> String {
    match e {
        Error::Config(m) => m,
        other => other.to_string(),
    }
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Splits on commas that are not inside parentheses.
fn split_list(value: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in value.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(value[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(value[start..].trim());
    out.retain(|s| !s.is_empty());
    out
}

/// Name a graph reference is reported under: the file stem for paths, the
/// reference itself for manifest names.
pub fn graph_name(reference: &str) -> String {
    let p = Path::new(reference);
    match p.file_stem() {
        Some(stem) if p.extension().is_some() || p.components().count() > 1 => stem.to_string_lossy().into_owned(),
        _ => reference.to_owned(),
    }
}
