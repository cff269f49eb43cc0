use proptest::prelude::*;
use walkbench::eval::{auc_pr, auc_roc, correlation_matrix, pearson, ScoreVector};

mod common;
use common::{brute_ap, brute_auc};

/// Labels with both classes and scores from a coarse grid so ties are common.
fn instance() -> impl Strategy<Value = (Vec<bool>, Vec<f64>)> {
    (2usize..=200)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(any::<bool>(), n),
                prop::collection::vec((0u32..40).prop_map(|k| k as f64 / 20.0 - 1.0), n),
            )
        })
        .prop_map(|(mut labels, scores)| {
            labels[0] = true;
            labels[1] = false;
            (labels, scores)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn auc_matches_pair_counting((labels, scores) in instance()) {
        let fast = auc_roc(&labels, &scores).unwrap();
        prop_assert!((fast - brute_auc(&labels, &scores)).abs() <= 1e-12);
        prop_assert!((0.0..=1.0).contains(&fast));
    }

    #[test]
    fn ap_matches_rank_walk((labels, scores) in instance()) {
        let fast = auc_pr(&labels, &scores).unwrap();
        prop_assert!((fast - brute_ap(&labels, &scores)).abs() <= 1e-12);
        prop_assert!((0.0..=1.0).contains(&fast));
    }
}

proptest! {
    #[test]
    fn aucs_ignore_increasing_transforms((labels, scores) in instance()) {
        let cubed: Vec<f64> = scores.iter().map(|x| x * x * x).collect();
        let min = scores.iter().copied().fold(f64::INFINITY, f64::min);
        let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let scaled: Vec<f64> = if max > min {
            scores.iter().map(|x| (x - min) / (max - min)).collect()
        } else {
            vec![0.5; scores.len()]
        };
        let roc = auc_roc(&labels, &scores).unwrap();
        let ap = auc_pr(&labels, &scores).unwrap();
        for t in [&cubed, &scaled] {
            prop_assert_eq!(auc_roc(&labels, t).unwrap(), roc);
            prop_assert_eq!(auc_pr(&labels, t).unwrap(), ap);
        }
    }

    #[test]
    fn pearson_affine_invariant(
        xy in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 3..100),
        a in 0.01f64..100.0,
        b in -50.0f64..50.0,
    ) {
        let (x, y): (Vec<f64>, Vec<f64>) = xy.into_iter().unzip();
        if let Ok(r) = pearson(&x, &y) {
            let ax: Vec<f64> = x.iter().map(|v| a * v + b).collect();
            prop_assert!((pearson(&ax, &y).unwrap() - r).abs() <= 1e-12);
            prop_assert!(r.abs() <= 1.0);
        }
    }

    #[test]
    fn correlation_matrix_symmetric_unit_diagonal(
        rows in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 12), 1..9),
    ) {
        let scores: Vec<ScoreVector> = rows
            .into_iter()
            .enumerate()
            .map(|(i, s)| ScoreVector { walk: format!("w{i}"), scores: s, normalized: false, undefined: 0 })
            .collect();
        let m = correlation_matrix(&scores).unwrap();
        prop_assert!(m.is_symmetric());
        for (_, _, r) in m.off_diagonal() {
            prop_assert!(r.abs() <= 1.0);
        }
    }
}
