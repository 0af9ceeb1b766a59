//! ROC curves and AUC with exact tie handling.

use serde::{Deserialize, Serialize};

use crate::impact_metrics::SuccessLabel;

use super::PredictorError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    /// (fpr, tpr), from (0, 0) to (1, 1).
    pub points: Vec<(f64, f64)>,
    pub auc: f64,
}

/// Sweeps thresholds over the unique scores, highest first. The trapezoid
/// area is accumulated in integers, so it equals the Mann-Whitney statistic
/// (ties counted as half) exactly.
pub fn roc_auc(scores: &[f64], labels: &[SuccessLabel]) -> Result<RocCurve, PredictorError> {
    if scores.len() != labels.len() {
        return Err(PredictorError::LengthMismatch {
            expected: labels.len(),
            got: scores.len(),
        });
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(PredictorError::NonFinite("score".into()));
    }
    let pos = labels.iter().filter(|l| l.is_success()).count() as u64;
    let neg = labels.len() as u64 - pos;
    if pos == 0 || neg == 0 {
        return Err(PredictorError::SingleClass);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut points = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0u64, 0u64);
    // twice the area in units of 1/(pos*neg)
    let mut area2: u128 = 0;
    let mut k = 0;
    while k < order.len() {
        let s = scores[order[k]];
        let (tp0, fp0) = (tp, fp);
        while k < order.len() && scores[order[k]] == s {
            if labels[order[k]].is_success() {
                tp += 1;
            } else {
                fp += 1;
            }
            k += 1;
        }
        area2 += (fp - fp0) as u128 * (tp + tp0) as u128;
        points.push((fp as f64 / neg as f64, tp as f64 / pos as f64));
    }
    Ok(RocCurve {
        points,
        auc: area2 as f64 / (2 * pos * neg) as f64,
    })
}
