//! Lock-free shared-state training. Workers read and write embedding rows
//! with relaxed atomics and no mutual exclusion; concurrent updates to the
//! same row may interleave.

use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::update::{for_each_pair, pair_update_with, Scratch};
use super::vocab::noise_sample_into;
use super::{EmbeddingMatrix, LrSchedule, TrainConfig, Trained, Vocab};
use crate::error::{Error, Result};
use crate::walk::WalkCorpus;

struct SharedMatrix {
    dim: usize,
    cells: Vec<AtomicU32>,
}

impl SharedMatrix {
    fn new(values: &[f32], dim: usize) -> Self {
        SharedMatrix {
            dim,
            cells: values.iter().map(|x| AtomicU32::new(x.to_bits())).collect(),
        }
    }

    fn load_row(&self, row: usize, out: &mut [f32]) {
        let cells = &self.cells[row * self.dim..(row + 1) * self.dim];
        for (o, c) in out.iter_mut().zip(cells) {
            *o = f32::from_bits(c.load(Ordering::Relaxed));
        }
    }

    fn add_row(&self, row: usize, delta: impl Iterator<Item = f32>) {
        let cells = &self.cells[row * self.dim..(row + 1) * self.dim];
        for (c, d) in cells.iter().zip(delta) {
            let v = f32::from_bits(c.load(Ordering::Relaxed)) + d;
            c.store(v.to_bits(), Ordering::Relaxed);
        }
    }

    fn into_vec(self) -> Vec<f32> {
        self.cells.into_iter().map(|c| f32::from_bits(c.into_inner())).collect()
    }
}

pub(super) fn train(
    corpus: &WalkCorpus,
    vocab: &Vocab,
    cfg: &TrainConfig,
    schedule: LrSchedule,
    emb: EmbeddingMatrix<f32>,
    rng: &mut ChaCha8Rng,
    threads: usize,
) -> Result<Trained> {
    let d = emb.dim;
    let input = SharedMatrix::new(&emb.input, d);
    let output = SharedMatrix::new(&emb.output, d);
    let processed = AtomicU64::new(0);
    let mut order: Vec<usize> = (0..corpus.sequences.len()).collect();
    let mut epoch_loss = Vec::with_capacity(cfg.epochs);

    for _ in 0..cfg.epochs {
        order.shuffle(rng);
        let chunk = order.len().div_ceil(threads).max(1);
        let seeds: Vec<u64> = (0..threads).map(|_| rng.gen()).collect();
        let results: Vec<Result<(f64, u64)>> = std::thread::scope(|scope| {
            let handles: Vec<_> = order
                .chunks(chunk)
                .zip(&seeds)
                .map(|(part, &seed)| {
                    let (input, output, processed) = (&input, &output, &processed);
                    scope.spawn(move || worker(corpus, vocab, cfg, schedule, part, seed, input, output, processed))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("training worker panicked"))
                .collect()
        });
        let (mut loss, mut pairs) = (0.0, 0u64);
        for r in results {
            let (l, p) = r?;
            loss += l;
            pairs += p;
        }
        epoch_loss.push(if pairs == 0 { 0.0 } else { loss / pairs as f64 });
    }

    let embedding = EmbeddingMatrix {
        dim: d,
        input: input.into_vec(),
        output: output.into_vec(),
    };
    if !embedding.is_finite() {
        return Err(Error::NonFinite("trained embedding"));
    }
    Ok(Trained {
        embedding,
        epoch_loss,
        pairs: processed.into_inner(),
    })
}

#[allow(clippy::too_many_arguments)]
fn worker(
    corpus: &WalkCorpus,
    vocab: &Vocab,
    cfg: &TrainConfig,
    schedule: LrSchedule,
    part: &[usize],
    seed: u64,
    input: &SharedMatrix,
    output: &SharedMatrix,
    processed: &AtomicU64,
) -> Result<(f64, u64)> {
    let d = input.dim;
    let k = cfg.negatives;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Local copy of the rows one pair touches: input row 0 is the center,
    // output row 0 the context and rows 1..=k the negatives.
    let mut local = EmbeddingMatrix::<f32>::zeros(k + 1, d);
    let mut before = EmbeddingMatrix::<f32>::zeros(k + 1, d);
    let local_negatives: Vec<usize> = (1..=k).collect();
    let mut negatives = Vec::with_capacity(k);
    let mut scratch = Scratch::default();
    let mut radii = Vec::new();
    let (mut loss, mut pairs) = (0.0f64, 0u64);
    let mut failure = None;

    for &s in part {
        let seq = &corpus.sequences[s];
        radii.clear();
        radii.extend((0..seq.len()).map(|_| rng.gen_range(1..=cfg.window)));
        for_each_pair(seq, |t| radii[t], |center, context| {
            if failure.is_some() {
                return;
            }
            noise_sample_into(vocab, context as usize, k, &mut rng, &mut negatives);
            input.load_row(center as usize, &mut local.input[..d]);
            for (j, &t) in std::iter::once(&(context as usize)).chain(&negatives).enumerate() {
                output.load_row(t, &mut local.output[j * d..(j + 1) * d]);
            }
            before.input[..d].copy_from_slice(&local.input[..d]);
            before.output.copy_from_slice(&local.output);

            let lr = schedule.at(processed.fetch_add(1, Ordering::Relaxed));
            match pair_update_with(&mut local, 0, 0, &local_negatives, lr, &mut scratch) {
                Ok(l) => loss += l as f64,
                Err(e) => {
                    failure = Some(e);
                    return;
                }
            }
            pairs += 1;

            input.add_row(
                center as usize,
                local.input[..d].iter().zip(&before.input[..d]).map(|(a, b)| a - b),
            );
            for (j, &t) in std::iter::once(&(context as usize)).chain(&negatives).enumerate() {
                let range = j * d..(j + 1) * d;
                let updated = local.output[range.clone()].iter().zip(&before.output[range]);
                output.add_row(t, updated.map(|(a, b)| a - b));
            }
        });
        if let Some(e) = failure.take() {
            return Err(e);
        }
    }
    Ok((loss, pairs))
}
