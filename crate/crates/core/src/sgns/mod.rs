//! Skip-gram with negative sampling over walk corpora.

mod hogwild;
mod io;
mod update;
mod vocab;

pub use io::{read_embedding, read_embedding_binary, write_embedding, write_embedding_binary};
pub use update::{fixed_window_pairs, positive_pairs, sgns_pair_update};
pub use vocab::{build_vocab, noise_sample, Vocab};

use num_traits::Float;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::walk::WalkCorpus;
use update::{expected_pairs, for_each_pair, pair_update_with, Scratch};
use vocab::noise_sample_into;

/// How updates are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrainMode {
    /// One thread, bitwise reproducible.
    #[default]
    Deterministic,
    /// Lock-free shared-state SGD across worker threads. Reproducible only in
    /// distribution.
    Async { threads: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub dim: usize,
    /// Maximum context window radius.
    pub window: usize,
    /// Negative samples per positive pair.
    pub negatives: usize,
    pub epochs: usize,
    pub lr_start: f64,
    pub lr_end: f64,
    pub noise_power: f64,
    pub seed: u64,
    pub mode: TrainMode,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: 128,
            window: 10,
            negatives: 5,
            epochs: 5,
            lr_start: 0.025,
            lr_end: 0.0001,
            noise_power: 0.75,
            seed: 1,
            mode: TrainMode::Deterministic,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.dim == 0 || self.window == 0 || self.negatives == 0 || self.epochs == 0 {
            return bad("dim, window, negatives and epochs must be at least 1".into());
        }
        if !(self.lr_end > 0.0 && self.lr_start >= self.lr_end && self.lr_start.is_finite()) {
            return bad(format!(
                "learning rates need lr_start >= lr_end > 0, got {} -> {}",
                self.lr_start, self.lr_end
            ));
        }
        if !self.noise_power.is_finite() {
            return bad(format!("noise power {}", self.noise_power));
        }
        if let TrainMode::Async { threads: 0 } = self.mode {
            return bad("async mode needs at least one thread".into());
        }
        Ok(())
    }
}

/// Input (`v_w`) and output (`v'_w`) vectors, row-major, `rows x dim` each.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix<T = f32> {
    pub dim: usize,
    pub input: Vec<T>,
    pub output: Vec<T>,
}

impl<T: Float> EmbeddingMatrix<T> {
    pub fn zeros(rows: usize, dim: usize) -> Self {
        EmbeddingMatrix {
            dim,
            input: vec![T::zero(); rows * dim],
            output: vec![T::zero(); rows * dim],
        }
    }

    pub fn rows(&self) -> usize {
        self.input.len().checked_div(self.dim).unwrap_or(0)
    }

    /// Node embedding (input vector) of row `i`.
    pub fn row(&self, i: usize) -> &[T] {
        &self.input[i * self.dim..(i + 1) * self.dim]
    }

    pub fn output_row(&self, i: usize) -> &[T] {
        &self.output[i * self.dim..(i + 1) * self.dim]
    }

    pub fn is_finite(&self) -> bool {
        self.input.iter().chain(&self.output).all(|x| x.is_finite())
    }
}

#[derive(Debug, Clone)]
pub struct Trained {
    pub embedding: EmbeddingMatrix<f32>,
    /// Mean pair loss per epoch.
    pub epoch_loss: Vec<f64>,
    pub pairs: u64,
}

/// Trains skip-gram embeddings on `corpus`. The vocabulary must cover exactly
/// the `node_count` nodes of the graph the corpus was walked on.
pub fn train_sgns(corpus: &WalkCorpus, node_count: usize, cfg: &TrainConfig) -> Result<Trained> {
    cfg.validate()?;
    let vocab = build_vocab(corpus, cfg.noise_power)?;
    let covered = vocab.freq.iter().filter(|&&f| f > 0).count();
    if vocab.len() != node_count || covered != node_count {
        return Err(Error::VocabMismatch {
            vocab: covered,
            graph: node_count,
        });
    }
    if node_count < 2 {
        return Err(Error::InvalidParameter("need at least two nodes to draw negatives".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut emb = EmbeddingMatrix::<f32>::zeros(node_count, cfg.dim);
    let half = 0.5 / cfg.dim as f32;
    for x in &mut emb.input {
        *x = rng.gen_range(-half..half);
    }

    let per_epoch: f64 = corpus
        .sequences
        .iter()
        .map(|s| expected_pairs(s.len(), cfg.window))
        .sum();
    let schedule = LrSchedule {
        start: cfg.lr_start,
        end: cfg.lr_end,
        total: (per_epoch * cfg.epochs as f64).max(1.0),
    };

    match cfg.mode {
        TrainMode::Deterministic => train_serial(corpus, &vocab, cfg, schedule, emb, &mut rng),
        TrainMode::Async { threads } => hogwild::train(corpus, &vocab, cfg, schedule, emb, &mut rng, threads),
    }
}

/// Linear decay from `start` to `end` over the expected number of pairs.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LrSchedule {
    start: f64,
    end: f64,
    total: f64,
}

impl LrSchedule {
    #[inline]
    pub(crate) fn at(&self, processed: u64) -> f32 {
        let frac = (processed as f64 / self.total).min(1.0);
        (self.start - (self.start - self.end) * frac).max(self.end) as f32
    }
}

fn train_serial(
    corpus: &WalkCorpus,
    vocab: &Vocab,
    cfg: &TrainConfig,
    schedule: LrSchedule,
    mut emb: EmbeddingMatrix<f32>,
    rng: &mut ChaCha8Rng,
) -> Result<Trained> {
    let mut order: Vec<usize> = (0..corpus.sequences.len()).collect();
    let mut scratch = Scratch::default();
    let mut negatives = Vec::with_capacity(cfg.negatives);
    let mut radii = Vec::new();
    let mut processed = 0u64;
    let mut epoch_loss = Vec::with_capacity(cfg.epochs);

    for _ in 0..cfg.epochs {
        order.shuffle(rng);
        let mut loss_sum = 0.0f64;
        let mut pairs = 0u64;
        for &s in &order {
            let seq = &corpus.sequences[s];
            radii.clear();
            radii.extend((0..seq.len()).map(|_| rng.gen_range(1..=cfg.window)));
            let mut failure = None;
            for_each_pair(seq, |t| radii[t], |center, context| {
                if failure.is_some() {
                    return;
                }
                noise_sample_into(vocab, context as usize, cfg.negatives, rng, &mut negatives);
                let lr = schedule.at(processed);
                match pair_update_with(&mut emb, center as usize, context as usize, &negatives, lr, &mut scratch) {
                    Ok(l) => loss_sum += l as f64,
                    Err(e) => failure = Some(e),
                }
                processed += 1;
                pairs += 1;
            });
            if let Some(e) = failure {
                return Err(e);
            }
        }
        epoch_loss.push(if pairs == 0 { 0.0 } else { loss_sum / pairs as f64 });
    }

    if !emb.is_finite() {
        return Err(Error::NonFinite("trained embedding"));
    }
    Ok(Trained {
        embedding: emb,
        epoch_loss,
        pairs: processed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::walk::{generate_corpus, WalkConfig, WalkKind};

    fn small_cfg() -> TrainConfig {
        TrainConfig {
            dim: 16,
            window: 3,
            epochs: 3,
            ..TrainConfig::default()
        }
    }

    fn ring_corpus() -> (Graph, WalkCorpus) {
        let g = Graph::from_edges(12, (0..12).map(|i| (i, (i + 1) % 12)));
        let c = generate_corpus(&g, &WalkConfig { walks_per_node: 5, walk_length: 20, ..WalkConfig::new(WalkKind::Rw, 2) });
        (g, c)
    }

    #[test]
    fn shape_and_finiteness() {
        let (g, corpus) = ring_corpus();
        let t = train_sgns(&corpus, g.node_count(), &small_cfg()).unwrap();
        assert_eq!(t.embedding.rows(), 12);
        assert_eq!(t.embedding.dim, 16);
        assert!(t.embedding.is_finite());
        assert!((0..12).all(|i| t.embedding.row(i).iter().any(|&x| x != 0.0)));
    }

    #[test]
    fn deterministic_mode_is_bitwise_reproducible() {
        let (g, corpus) = ring_corpus();
        let a = train_sgns(&corpus, g.node_count(), &small_cfg()).unwrap();
        let b = train_sgns(&corpus, g.node_count(), &small_cfg()).unwrap();
        assert_eq!(a.embedding, b.embedding);
        assert_eq!(a.epoch_loss, b.epoch_loss);
    }

    #[test]
    fn loss_decreases_after_first_epoch() {
        let (g, corpus) = ring_corpus();
        let t = train_sgns(&corpus, g.node_count(), &small_cfg()).unwrap();
        assert!(t.epoch_loss[1..].iter().all(|&l| l < t.epoch_loss[0]), "{:?}", t.epoch_loss);
    }

    #[test]
    fn vocabulary_must_match_graph() {
        let (_, corpus) = ring_corpus();
        assert!(matches!(
            train_sgns(&corpus, 13, &small_cfg()),
            Err(Error::VocabMismatch { vocab: 12, graph: 13 })
        ));
    }

    #[test]
    fn rejects_bad_config() {
        let (g, corpus) = ring_corpus();
        for cfg in [
            TrainConfig { dim: 0, ..small_cfg() },
            TrainConfig { lr_end: 0.0, ..small_cfg() },
            TrainConfig { lr_start: 0.001, lr_end: 0.01, ..small_cfg() },
            TrainConfig { mode: TrainMode::Async { threads: 0 }, ..small_cfg() },
        ] {
            assert!(train_sgns(&corpus, g.node_count(), &cfg).is_err());
        }
    }

    #[test]
    fn async_mode_trains() {
        let (g, corpus) = ring_corpus();
        let cfg = TrainConfig { mode: TrainMode::Async { threads: 3 }, ..small_cfg() };
        let t = train_sgns(&corpus, g.node_count(), &cfg).unwrap();
        assert!(t.embedding.is_finite());
        assert!(t.epoch_loss.last().unwrap() < &t.epoch_loss[0]);
    }

    #[test]
    fn schedule_is_linear_and_clamped() {
        let s = LrSchedule { start: 0.025, end: 0.0001, total: 100.0 };
        assert_eq!(s.at(0), 0.025);
        assert!((s.at(50) as f64 - 0.01255).abs() < 1e-7);
        assert_eq!(s.at(100), 0.0001);
        assert_eq!(s.at(1000), 0.0001);
    }
}
