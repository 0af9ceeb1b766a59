//! A 53-column feature table with known structure: a block of informative
//! features, a few near-copies of the strongest ones, and pure noise.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::audio_dsp::registry::{feature_names, FEATURES};
use crate::impact_metrics::SuccessLabel;
use crate::predictor::FeatureTable;

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusParams {
    pub n_rows: usize,
    pub n_positive: usize,
    pub n_informative: usize,
    /// Each copies one of the strongest informative features.
    pub n_duplicates: usize,
    /// Class-mean separation of the weakest and strongest informative
    /// features, in noise standard deviations.
    pub effect_min: f64,
    pub effect_max: f64,
    /// Noise added to a near-duplicate, relative to its source's spread.
    pub duplicate_noise: f64,
}

impl Default for CorpusParams {
    fn default() -> Self {
        Self {
            n_rows: 204,
            n_positive: 130,
            n_informative: 17,
            n_duplicates: 3,
            effect_min: 1.0,
            effect_max: 1.6,
            duplicate_noise: 0.1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub table: FeatureTable,
    pub labels: BTreeMap<String, SuccessLabel>,
    /// Informative columns, strongest first.
    pub informative: Vec<String>,
    /// (duplicate, source) pairs.
    pub duplicates: Vec<(String, String)>,
}

/// Exactly `n_positive` of `n` labels set, in seeded random order.
pub fn balanced_labels(n: usize, n_positive: usize, rng: &mut ChaCha8Rng) -> Vec<bool> {
    let mut y: Vec<bool> = (0..n).map(|i| i < n_positive).collect();
    y.shuffle(rng);
    y
}

/// Columns use the audio registry names. Informative features sit at every
/// third registry slot so they are spread across feature families; duplicates
/// take the slot right after their source.
pub fn feature_corpus(p: &CorpusParams, seed: u64) -> SynthCorpus {
    let names: Vec<String> = feature_names().into_iter().map(String::from).collect();
    let n_feat = names.len();
    assert!(p.n_informative * 3 <= n_feat + 2 && p.n_duplicates <= p.n_informative);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let std = Normal::new(0.0, 1.0).expect("unit normal");
    let y = balanced_labels(p.n_rows, p.n_positive, &mut rng);

    let informative: Vec<usize> = (0..p.n_informative).map(|k| 3 * k).collect();
    let effect = |k: usize| {
        let frac = if p.n_informative > 1 { k as f64 / (p.n_informative - 1) as f64 } else { 0.0 };
        p.effect_max - frac * (p.effect_max - p.effect_min)
    };
    let duplicates: Vec<(usize, usize)> = (0..p.n_duplicates).map(|k| (3 * k + 1, 3 * k)).collect();

    let mut table = FeatureTable::new(names.clone());
    let mut labels = BTreeMap::new();
    for (i, &yi) in y.iter().enumerate() {
        let s = if yi { 0.5 } else { -0.5 };
        let mut z: Vec<f64> = (0..n_feat).map(|_| std.sample(&mut rng)).collect();
        for (k, &j) in informative.iter().enumerate() {
            // A duplicated feature shares its weight with the copy, so it
            // gets twice the separation to stay ranked with the others.
            let boost = if k < p.n_duplicates { 2.0 } else { 1.0 };
            z[j] += s * boost * effect(k);
        }
        for &(d, src) in &duplicates {
            z[d] = z[src] + p.duplicate_noise * std.sample(&mut rng);
        }
        // Put each column on a plausible scale for its unit.
        let values = z
            .iter()
            .zip(FEATURES.iter())
            .map(|(&v, spec)| {
                let (centre, spread) = unit_scale(spec.unit);
                Some(centre + spread * v)
            })
            .collect();
        let id = format!("synth-{i:04}");
        table.push(&id, values).expect("row width");
        labels.insert(id, SuccessLabel::from_bool(yi));
    }
    SynthCorpus {
        table,
        labels,
        informative: informative.iter().map(|&j| names[j].clone()).collect(),
        duplicates: duplicates.iter().map(|&(d, s)| (names[d].clone(), names[s].clone())).collect(),
    }
}

fn unit_scale(unit: &str) -> (f64, f64) {
    match unit {
        "Hz" => (400.0, 40.0),
        "dB" | "dBFS" => (-20.0, 3.0),
        "s" => (5.0, 1.0),
        "cm" => (16.0, 1.0),
        _ => (1.0, 0.1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_and_balance() {
        let c = feature_corpus(&CorpusParams::default(), 1);
        assert_eq!(c.table.rows.len(), 204);
        assert_eq!(c.table.feature_names.len(), 53);
        assert_eq!(c.labels.values().filter(|l| l.is_success()).count(), 130);
        assert_eq!(c.informative.len(), 17);
        assert_eq!(c.duplicates.len(), 3);
    }

    #[test]
    fn duplicates_track_their_source() {
        let c = feature_corpus(&CorpusParams::default(), 2);
        for (d, s) in &c.duplicates {
            let col = |n: &str| -> Vec<f64> {
                let j = c.table.feature_names.iter().position(|x| x == n).unwrap();
                c.table.rows.iter().map(|r| r.1[j].unwrap()).collect()
            };
            assert!(crate::predictor::correlation(&col(d), &col(s)) > 0.98);
        }
    }

    #[test]
    fn selection_keeps_one_of_each_duplicate_pair() {
        use crate::config::SvmConfig;
        use crate::predictor::{select_features, Dataset};
        for seed in 0..10 {
            let c = feature_corpus(&CorpusParams::default(), seed);
            let (d, _) = Dataset::from_table(&c.table, &c.labels);
            let sel = select_features(&d, &SvmConfig::default()).unwrap();
            assert_eq!(sel.selected.len(), 17, "seed {seed}");
            assert_eq!(sel.pruned.len(), 3);
            for p in &sel.pruned {
                assert!(c.duplicates.iter().any(|(a, b)| (a, b) == (&p.name, &p.partner) || (b, a) == (&p.name, &p.partner)));
            }
        }
    }
}
