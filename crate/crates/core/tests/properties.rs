use adaptive_eval::io::{parse_score_matrix, write_score_matrix, MatrixFormat};
use adaptive_eval::measurements::{
    decay_weights, learning, measurement_series_with, performance, potential, retention, MetricRange, ScoreMatrix,
};
use adaptive_eval::metrics::{auroc, mean_ci, IntervalMethod, PredictionSet};
use proptest::prelude::*;

fn pair_count(labels: &[bool], scores: &[f64]) -> f64 {
    let (mut wins, mut pairs) = (0.0, 0.0);
    for (i, &yi) in labels.iter().enumerate() {
        for (j, &yj) in labels.iter().enumerate() {
            if yi && !yj {
                pairs += 1.0;
                wins += match scores[i].partial_cmp(&scores[j]).unwrap() {
                    std::cmp::Ordering::Greater => 1.0,
                    std::cmp::Ordering::Equal => 0.5,
                    std::cmp::Ordering::Less => 0.0,
                };
            }
        }
    }
    wins / pairs
}

/// Labels with both classes, scores on a coarse grid so ties are common.
fn prediction_set() -> impl Strategy<Value = (Vec<bool>, Vec<f64>)> {
    (2usize..60).prop_flat_map(|n| {
        (
            prop::collection::vec(any::<bool>(), n).prop_map(|mut l| {
                l[0] = true;
                l[1] = false;
                l
            }),
            prop::collection::vec((0u32..20).prop_map(|k| k as f64 / 20.0), n),
        )
    })
}

/// Upper-triangle-plus-superdiagonal matrix, flattened per repetition.
fn score_matrix(max_steps: usize, max_reps: usize) -> impl Strategy<Value = ScoreMatrix> {
    (2..=max_steps, 1..=max_reps).prop_flat_map(|(steps, reps)| {
        prop::collection::vec(0.0f64..=1.0, steps * steps * reps).prop_map(move |vals| {
            let mut b = ScoreMatrix::builder(steps, reps);
            for r in 0..reps {
                for m in 0..steps {
                    for d in 0..=(m + 1).min(steps - 1) {
                        b.insert(m, d, r, vals[(r * steps + m) * steps + d]).unwrap();
                    }
                }
            }
            b.build()
        })
    })
}

proptest! {
    #[test]
    fn auroc_matches_pair_count((labels, scores) in prediction_set()) {
        let set = PredictionSet::new(labels.clone(), scores.clone()).unwrap();
        prop_assert!((auroc(&set).unwrap() - pair_count(&labels, &scores)).abs() <= 1e-12);
    }

    #[test]
    fn auroc_ignores_monotone_transforms((labels, scores) in prediction_set(), a in 0.1f64..10.0, b in -5.0f64..5.0) {
        let base = auroc(&PredictionSet::new(labels.clone(), scores.clone()).unwrap()).unwrap();
        let moved: Vec<f64> = scores.iter().map(|s| (a * s + b).exp()).collect();
        prop_assert_eq!(auroc(&PredictionSet::new(labels, moved).unwrap()).unwrap(), base);
    }

    #[test]
    fn flipping_labels_complements_auroc((labels, scores) in prediction_set()) {
        let flipped: Vec<bool> = labels.iter().map(|l| !l).collect();
        let a = auroc(&PredictionSet::new(labels, scores.clone()).unwrap()).unwrap();
        let b = auroc(&PredictionSet::new(flipped, scores).unwrap()).unwrap();
        prop_assert!((a + b - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn decay_weights_are_a_distribution(step in 1usize..40, lambda in 0.0f64..20.0) {
        let w = decay_weights(step, lambda).unwrap();
        prop_assert_eq!(w.weights().len(), step);
        prop_assert!((w.weights().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(w.weights().windows(2).all(|p| p[0] <= p[1]));
    }

    #[test]
    fn learning_minus_potential_telescopes(m in score_matrix(7, 3)) {
        for r in 0..m.num_repetitions() {
            for v in 1..m.num_steps() {
                let delta = performance(&m, v, r).unwrap() - performance(&m, v - 1, r).unwrap();
                let gap = learning(&m, v, r).unwrap() - potential(&m, v, r).unwrap();
                prop_assert!((gap - delta).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn retention_is_a_convex_combination(m in score_matrix(8, 1), lambda in 0.0f64..10.0) {
        for v in 1..m.num_steps() {
            let prior: Vec<f64> = (0..v).map(|d| m.score(v, d, 0).unwrap()).collect();
            let r = retention(&m, v, lambda, 0).unwrap();
            prop_assert!(prior.iter().cloned().fold(f64::INFINITY, f64::min) <= r);
            prop_assert!(r <= prior.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
        }
    }

    #[test]
    fn shifting_scores_leaves_differences_alone(m in score_matrix(6, 2), c in -0.5f64..0.5) {
        let range = MetricRange::new(-1.0, 2.0).unwrap();
        let shifted = m.map_scores(range, |s| s + c).unwrap();
        for r in 0..m.num_repetitions() {
            for v in 1..m.num_steps() {
                prop_assert!((learning(&m, v, r).unwrap() - learning(&shifted, v, r).unwrap()).abs() <= 1e-12);
                prop_assert!((potential(&m, v, r).unwrap() - potential(&shifted, v, r).unwrap()).abs() <= 1e-12);
                prop_assert!((retention(&m, v, 0.5, r).unwrap() + c - retention(&shifted, v, 0.5, r).unwrap()).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn intervals_ignore_repetition_order(mut samples in prop::collection::vec(0.0f64..1.0, 2..30), seed in any::<u64>()) {
        let a = mean_ci(&samples, 0.95).unwrap();
        let n = samples.len();
        samples.rotate_left(seed as usize % n);
        samples.swap(0, n - 1);
        let b = mean_ci(&samples, 0.95).unwrap();
        prop_assert_eq!(a.ci_low, b.ci_low);
        prop_assert_eq!(a.ci_high, b.ci_high);
        prop_assert!((a.mean - b.mean).abs() <= 1e-15);
        prop_assert!(a.ci_low <= a.mean && a.mean <= a.ci_high);
    }

    #[test]
    fn series_intervals_bracket_means(m in score_matrix(5, 6)) {
        for method in [IntervalMethod::Normal, IntervalMethod::Bootstrap { resamples: 200, seed: 1 }] {
            let s = measurement_series_with(&m, 0.5, 0.9, method).unwrap();
            for p in &s.points {
                for e in [Some(p.performance), p.learning, p.potential, p.retention].into_iter().flatten() {
                    prop_assert!(e.ci_low <= e.mean && e.mean <= e.ci_high);
                }
            }
        }
    }

    #[test]
    fn structured_matrix_round_trip(m in score_matrix(6, 4)) {
        let bytes = write_score_matrix(&m, MatrixFormat::Structured);
        prop_assert_eq!(parse_score_matrix(&bytes, MatrixFormat::Structured).unwrap(), m);
    }

    #[test]
    fn delimited_matrix_round_trip(m in score_matrix(6, 4)) {
        let bytes = write_score_matrix(&m, MatrixFormat::Delimited);
        prop_assert_eq!(parse_score_matrix(&bytes, MatrixFormat::Delimited).unwrap(), m);
    }
}
