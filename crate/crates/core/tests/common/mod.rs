//! Reference implementations shared by the integration tests.
#![allow(dead_code)]

/// Direct pair counting over every (positive, negative) combination.
pub fn brute_auc(labels: &[bool], scores: &[f64]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, &li) in labels.iter().enumerate() {
        for (j, &lj) in labels.iter().enumerate() {
            if li && !lj {
                den += 1.0;
                if scores[i] > scores[j] {
                    num += 1.0;
                } else if scores[i] == scores[j] {
                    num += 0.5;
                }
            }
        }
    }
    num / den
}

/// Average precision by walking a rank list built with a selection sort,
/// taking the earliest index on equal scores.
pub fn brute_ap(labels: &[bool], scores: &[f64]) -> f64 {
    let mut remaining: Vec<usize> = (0..scores.len()).collect();
    let mut ranked = Vec::new();
    while !remaining.is_empty() {
        let mut best = 0;
        for k in 1..remaining.len() {
            if scores[remaining[k]] > scores[remaining[best]] {
                best = k;
            }
        }
        ranked.push(remaining.remove(best));
    }
    let n_pos = labels.iter().filter(|&&l| l).count() as f64;
    let mut hits = 0.0;
    let mut ap = 0.0;
    for (rank, &i) in ranked.iter().enumerate() {
        if labels[i] {
            hits += 1.0;
            ap += (hits / (rank as f64 + 1.0)) * (1.0 / n_pos);
        }
    }
    ap
}

