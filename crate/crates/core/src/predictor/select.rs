//! Weight-ranked feature selection with correlation pruning.

use serde::{Deserialize, Serialize};

use crate::config::SvmConfig;

use super::dataset::Dataset;
use super::svm::train_linear_svm;
use super::PredictorError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedFeature {
    pub name: String,
    /// 1-based rank by |w|.
    pub rank: usize,
    pub abs_weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrunedFeature {
    pub name: String,
    /// Higher-ranked kept feature it correlated with.
    pub partner: String,
    pub corr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSubset {
    pub selected: Vec<String>,
    pub ranking: Vec<RankedFeature>,
    pub pruned: Vec<PrunedFeature>,
}

/// Pearson correlation; 0 when either column is constant.
pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    if saa <= 0.0 || sbb <= 0.0 {
        0.0
    } else {
        (sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0)
    }
}

/// Fits on all features, keeps the `top_k` largest |w|, then walks them in
/// rank order dropping any whose |corr| with an already kept feature exceeds
/// `corr_max`.
pub fn select_features(d: &Dataset, cfg: &SvmConfig) -> Result<FeatureSubset, PredictorError> {
    let model = train_linear_svm(d, cfg)?;
    let mut order: Vec<usize> = (0..d.n_features()).collect();
    // stable sort keeps registry order among equal weights
    order.sort_by(|&a, &b| model.w[b].abs().total_cmp(&model.w[a].abs()));
    let ranking: Vec<RankedFeature> = order
        .iter()
        .enumerate()
        .map(|(r, &j)| RankedFeature {
            name: d.feature_names[j].clone(),
            rank: r + 1,
            abs_weight: model.w[j].abs(),
        })
        .collect();
    let columns: Vec<Vec<f64>> = (0..d.n_features()).map(|j| d.column(j)).collect();
    let mut kept: Vec<usize> = Vec::new();
    let mut pruned = Vec::new();
    for &j in order.iter().take(cfg.top_k) {
        let worst = kept
            .iter()
            .map(|&k| (k, correlation(&columns[j], &columns[k])))
            .find(|(_, r)| r.abs() > cfg.corr_max);
        match worst {
            Some((k, r)) => pruned.push(PrunedFeature {
                name: d.feature_names[j].clone(),
                partner: d.feature_names[k].clone(),
                corr: r,
            }),
            None => kept.push(j),
        }
    }
    Ok(FeatureSubset {
        selected: kept.iter().map(|&j| d.feature_names[j].clone()).collect(),
        ranking,
        pruned,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::impact_metrics::SuccessLabel;
    use crate::predictor::dataset::Row;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn data(dup: bool) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p = 10;
        let rows = (0..80)
            .map(|i| {
                let y = i % 2 == 0;
                let s = if y { 1.0 } else { -1.0 };
                let mut x: Vec<f64> = (0..p)
                    .map(|j| s * (0.2 + 0.1 * j as f64) + rng.random_range(-1.0..1.0))
                    .collect();
                if dup {
                    x[9] = x[0] * 2.0 + 1.0;
                }
                Row {
                    session_id: format!("r{i}"),
                    x,
                    y: SuccessLabel::from_bool(y),
                }
            })
            .collect();
        Dataset::new((0..p).map(|j| format!("f{j}")).collect(), rows).unwrap()
    }

    #[test]
    fn correlation_basics() {
        assert_eq!(correlation(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]), 1.0);
        assert_eq!(correlation(&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0]), 0.0);
    }

    #[test]
    fn exact_duplicate_keeps_one() {
        let d = data(true);
        let s = select_features(&d, &SvmConfig::default()).unwrap();
        let has0 = s.selected.iter().any(|n| n == "f0");
        let has9 = s.selected.iter().any(|n| n == "f9");
        assert!(has0 ^ has9);
        assert_eq!(s.pruned.len(), 1);
        let rank = |n: &str| s.ranking.iter().find(|r| r.name == n).unwrap().rank;
        let survivor = if has0 { "f0" } else { "f9" };
        assert_eq!(s.pruned[0].partner, survivor);
        assert!(rank(survivor) < rank(&s.pruned[0].name));
    }

    #[test]
    fn uncorrelated_keeps_all() {
        let s = select_features(&data(false), &SvmConfig::default()).unwrap();
        assert_eq!(s.selected.len(), 10);
        assert!(s.pruned.is_empty());
    }
}
