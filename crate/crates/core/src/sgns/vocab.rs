use rand::Rng;

use crate::error::{Error, Result};
use crate::walk::WalkCorpus;

/// Token frequencies of a corpus and the derived noise distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocab {
    pub freq: Vec<u64>,
    /// Cumulative noise distribution, `freq^power` normalized; last entry is 1.
    noise_cdf: Vec<f64>,
}

impl Vocab {
    /// Vocabulary size W: one entry per node index up to the largest seen.
    pub fn len(&self) -> usize {
        self.freq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freq.is_empty()
    }

    pub fn total_tokens(&self) -> u64 {
        self.freq.iter().sum()
    }

    pub fn noise_probs(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.noise_cdf
            .iter()
            .map(|&c| {
                let p = c - prev;
                prev = c;
                p
            })
            .collect()
    }

    #[inline]
    fn draw(&self, rng: &mut impl Rng) -> usize {
        let u = rng.gen::<f64>();
        self.noise_cdf
            .partition_point(|&c| c <= u)
            .min(self.noise_cdf.len() - 1)
    }
}

pub fn build_vocab(corpus: &WalkCorpus, noise_power: f64) -> Result<Vocab> {
    let size = corpus
        .sequences
        .iter()
        .flatten()
        .map(|&x| x as usize + 1)
        .max()
        .ok_or(Error::EmptyInput("corpus"))?;
    let mut freq = vec![0u64; size];
    for &x in corpus.sequences.iter().flatten() {
        freq[x as usize] += 1;
    }
    if !noise_power.is_finite() {
        return Err(Error::InvalidParameter(format!("noise power {noise_power}")));
    }
    let weights: Vec<f64> = freq
        .iter()
        .map(|&f| if f == 0 { 0.0 } else { (f as f64).powf(noise_power) })
        .collect();
    let total: f64 = weights.iter().sum();
    let mut acc = 0.0;
    let mut noise_cdf: Vec<f64> = weights
        .iter()
        .map(|w| {
            acc += w;
            acc / total
        })
        .collect();
    if let Some(last) = noise_cdf.last_mut() {
        *last = 1.0;
    }
    Ok(Vocab { freq, noise_cdf })
}

/// `k` draws from the noise distribution, redrawing any that hit `exclude`.
pub fn noise_sample(vocab: &Vocab, exclude: usize, k: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    noise_sample_into(vocab, exclude, k, rng, &mut out);
    out
}

pub(crate) fn noise_sample_into(vocab: &Vocab, exclude: usize, k: usize, rng: &mut impl Rng, out: &mut Vec<usize>) {
    const MAX_REDRAWS: usize = 64;
    out.clear();
    let w = vocab.len();
    for _ in 0..k {
        let mut pick = vocab.draw(rng);
        let mut tries = 0;
        while pick == exclude && tries < MAX_REDRAWS {
            pick = vocab.draw(rng);
            tries += 1;
        }
        if pick == exclude {
            // Essentially all noise mass sits on `exclude`; take any other node.
            pick = (exclude + 1 + rng.gen_range(0..w - 1)) % w;
        }
        out.push(pick);
    }
}
