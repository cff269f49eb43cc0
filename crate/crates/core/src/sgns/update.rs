use num_traits::Float;
use rand::Rng;

use super::EmbeddingMatrix;
use crate::error::{Error, Result};

#[inline]
pub(crate) fn dot<T: Float>(a: &[T], b: &[T]) -> T {
    // Eight independent partial sums so the loop vectorizes.
    let mut acc = [T::zero(); 8];
    let chunks_a = a.chunks_exact(8);
    let chunks_b = b.chunks_exact(8);
    let tail = chunks_a
        .remainder()
        .iter()
        .zip(chunks_b.remainder())
        .fold(T::zero(), |s, (&x, &y)| s + x * y);
    for (ca, cb) in chunks_a.zip(chunks_b) {
        for i in 0..8 {
            acc[i] = acc[i] + ca[i] * cb[i];
        }
    }
    acc.iter().fold(tail, |s, &x| s + x)
}

/// `y += a * x`
#[inline]
fn axpy<T: Float>(y: &mut [T], a: T, x: &[T]) {
    let x = &x[..y.len()];
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi = *yi + a * xi;
    }
}

/// Returns `(sigmoid(s), -ln sigmoid(s), -ln sigmoid(-s))` from a single
/// exponential, stable for large |s|.
#[inline]
fn logistic_terms<T: Float>(s: T) -> (T, T, T) {
    let e = (-s.abs()).exp();
    let soft = e.ln_1p();
    if s >= T::zero() {
        (T::one() / (T::one() + e), soft, soft + s)
    } else {
        (e / (T::one() + e), soft - s, soft)
    }
}

/// Reusable buffers for [`pair_update_with`].
#[derive(Debug, Clone)]
pub(crate) struct Scratch<T> {
    coefs: Vec<T>,
    center_grad: Vec<T>,
}

impl<T> Default for Scratch<T> {
    fn default() -> Self {
        Scratch {
            coefs: Vec::new(),
            center_grad: Vec::new(),
        }
    }
}

/// One SGD step of skip-gram with negative sampling on a single
/// (center, context) pair. Returns the pair loss
/// `-ln s(v'_ctx . v_c) - sum_neg ln s(-v'_neg . v_c)` evaluated before the step.
///
/// All gradients are taken at the pre-step parameters, so repeated rows among
/// `context` and `negatives` receive the exact gradient of the summed loss.
pub fn sgns_pair_update<T: Float>(
    emb: &mut EmbeddingMatrix<T>,
    center: usize,
    context: usize,
    negatives: &[usize],
    lr: T,
) -> Result<T> {
    let rows = emb.rows();
    for &i in std::iter::once(&center).chain(std::iter::once(&context)).chain(negatives) {
        if i >= rows {
            return Err(Error::MissingNode { node: i, len: rows });
        }
    }
    pair_update_with(emb, center, context, negatives, lr, &mut Scratch::default())
}

pub(crate) fn pair_update_with<T: Float>(
    emb: &mut EmbeddingMatrix<T>,
    center: usize,
    context: usize,
    negatives: &[usize],
    lr: T,
    scratch: &mut Scratch<T>,
) -> Result<T> {
    let d = emb.dim;
    let targets = || std::iter::once((context, true)).chain(negatives.iter().map(|&n| (n, false)));

    let mut loss = T::zero();
    scratch.coefs.clear();
    {
        let v = &emb.input[center * d..(center + 1) * d];
        for (t, positive) in targets() {
            let s = dot(&emb.output[t * d..(t + 1) * d], v);
            if !s.is_finite() {
                return Err(Error::NonFinite("pair score"));
            }
            // dL/ds is sigmoid(s) - label.
            let (sig, pos_loss, neg_loss) = logistic_terms(s);
            let (g, l) = if positive {
                (sig - T::one(), pos_loss)
            } else {
                (sig, neg_loss)
            };
            scratch.coefs.push(g);
            loss = loss + l;
        }
    }

    scratch.center_grad.clear();
    scratch.center_grad.resize(d, T::zero());
    for ((t, _), &g) in targets().zip(&scratch.coefs) {
        axpy(&mut scratch.center_grad, g, &emb.output[t * d..(t + 1) * d]);
    }
    for ((t, _), &g) in targets().zip(&scratch.coefs) {
        let (input, output) = (&emb.input, &mut emb.output);
        axpy(&mut output[t * d..(t + 1) * d], -(lr * g), &input[center * d..(center + 1) * d]);
    }
    axpy(&mut emb.input[center * d..(center + 1) * d], -lr, &scratch.center_grad);
    Ok(loss)
}

/// Calls `emit(center, context)` for every position `t` of `sequence` and
/// every offset `0 < |j| <= radius(t)` that stays in bounds.
pub(crate) fn for_each_pair(
    sequence: &[u32],
    mut radius: impl FnMut(usize) -> usize,
    mut emit: impl FnMut(u32, u32),
) {
    let len = sequence.len();
    for t in 0..len {
        let r = radius(t);
        let lo = t.saturating_sub(r);
        let hi = (t + r).min(len - 1);
        for j in lo..=hi {
            if j != t {
                emit(sequence[t], sequence[j]);
            }
        }
    }
}

/// Skip-gram (center, context) pairs. The window radius is drawn uniformly
/// from `1..=window` per position, so distant contexts are sampled less often.
pub fn positive_pairs(sequence: &[u32], window: usize, rng: &mut impl Rng) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for_each_pair(sequence, |_| rng.gen_range(1..=window), |c, x| out.push((c, x)));
    out
}

/// Pairs with a fixed radius at every position.
pub fn fixed_window_pairs(sequence: &[u32], radius: usize) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for_each_pair(sequence, |_| radius, |c, x| out.push((c, x)));
    out
}

/// Expected pair count of a sequence of length `len` under uniform window
/// shrinking with maximum radius `window`.
pub(crate) fn expected_pairs(len: usize, window: usize) -> f64 {
    if len < 2 {
        return 0.0;
    }
    let mut total = 0usize;
    for r in 1..=window {
        for t in 0..len {
            total += t.min(r) + (len - 1 - t).min(r);
        }
    }
    total as f64 / window as f64
}
