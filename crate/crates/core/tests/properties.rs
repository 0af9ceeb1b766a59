use proptest::prelude::*;

use impact_core::emotion_space::{emotion_vector, EmotionFrame, EmotionMap, NUM_EMOTIONS};
use impact_core::impact_metrics::{impact_score, SuccessLabel};
use impact_core::predictor::roc_auc;
use impact_core::session_store::{resample_events, SampledSeries};
use impact_core::stats_report::{chi_square_2x2, pearson, stepdown_adjust, ContingencyTable2x2};

fn pair_vecs() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (3usize..40).prop_flat_map(|n| {
        (
            prop::collection::vec(-100.0..100.0f64, n),
            prop::collection::vec(-100.0..100.0f64, n),
        )
    })
}

proptest! {
    #[test]
    fn pearson_affine_invariant((x, y) in pair_vecs(), a in 0.1..10.0f64, b in -50.0..50.0f64) {
        if let Ok(r0) = pearson(&x, &y) {
            let xs: Vec<f64> = x.iter().map(|v| a * v + b).collect();
            let r1 = pearson(&xs, &y).unwrap();
            prop_assert!((r0.r - r1.r).abs() < 1e-9);
            let neg: Vec<f64> = x.iter().map(|v| -a * v).collect();
            prop_assert!((pearson(&neg, &y).unwrap().r + r0.r).abs() < 1e-9);
            prop_assert!(r0.r.abs() <= 1.0 && (0.0..=1.0).contains(&r0.p_two_sided));
        }
    }

    #[test]
    fn stepdown_monotone_and_dominating(p in prop::collection::vec(0.0..=1.0f64, 1..30)) {
        let adj = stepdown_adjust(&p).unwrap();
        prop_assert_eq!(adj.len(), p.len());
        for (raw, a) in p.iter().zip(&adj) {
            prop_assert!(a >= raw && *a <= 1.0);
        }
        let mut order: Vec<usize> = (0..p.len()).collect();
        order.sort_by(|&i, &j| p[i].total_cmp(&p[j]));
        for w in order.windows(2) {
            prop_assert!(adj[w[0]] <= adj[w[1]]);
        }
    }

    #[test]
    fn chi_square_symmetric(a in 0u64..50, b in 0u64..50, c in 0u64..50, d in 0u64..50) {
        let t = ContingencyTable2x2::from_rows([[a, b], [c, d]]);
        match (chi_square_2x2(&t), chi_square_2x2(&t.transposed())) {
            (Ok(x), Ok(y)) => {
                prop_assert!((x.chi2 - y.chi2).abs() <= 1e-9 * x.chi2.max(1.0));
                let swapped = ContingencyTable2x2::from_rows([[c, d], [a, b]]);
                prop_assert!((chi_square_2x2(&swapped).unwrap().chi2 - x.chi2).abs() <= 1e-9 * x.chi2.max(1.0));
            }
            (Err(_), Err(_)) => {}
            (x, y) => prop_assert!(false, "{x:?} vs {y:?}"),
        }
    }

    #[test]
    fn roc_auc_flips_with_scores(scores in prop::collection::vec(-5i32..5, 4..50), bits in prop::collection::vec(any::<bool>(), 50)) {
        let mut labels: Vec<SuccessLabel> = bits[..scores.len()].iter().map(|&b| SuccessLabel::from_bool(b)).collect();
        labels[0] = SuccessLabel::Successful;
        labels[1] = SuccessLabel::Unsuccessful;
        let s: Vec<f64> = scores.iter().map(|&v| v as f64).collect();
        let neg: Vec<f64> = s.iter().map(|v| -v).collect();
        let a = roc_auc(&s, &labels).unwrap().auc;
        let b = roc_auc(&neg, &labels).unwrap().auc;
        prop_assert!((a + b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn emotion_vector_convex_hull(w in prop::collection::vec(0.0..1.0f64, NUM_EMOTIONS)) {
        let total: f64 = w.iter().sum();
        prop_assume!(total > 0.0);
        let mut f = EmotionFrame::zeros(0.0);
        for (p, v) in f.p.iter_mut().zip(&w) {
            *p = v / total;
        }
        let v = emotion_vector(&f, &EmotionMap::canonical());
        prop_assert!(v[0].abs() <= 1.0 + 1e-12 && v[1].abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn resample_round_trip(values in prop::collection::vec(-1i8..=1, 1..300)) {
        let s = SampledSeries::new(30.0, values);
        let back = resample_events(&s.to_event_stream(), s.duration, 30.0);
        prop_assert_eq!(&back.values, &s.values);
        let a = impact_score(&s).unwrap();
        let b = impact_score(&back).unwrap();
        prop_assert!((a.value - b.value).abs() < 1e-12);
    }
}
