//! Leave-one-out cross-validation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::SvmConfig;
use crate::impact_metrics::SuccessLabel;

use super::dataset::Dataset;
use super::svm::train_linear_svm;
use super::PredictorError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub session_id: String,
    pub label: SuccessLabel,
    pub score: f64,
    pub predicted: SuccessLabel,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    /// In dataset row order.
    pub predictions: Vec<Prediction>,
    /// Rows whose training split had a single class.
    pub skipped: Vec<String>,
    pub accuracy: f64,
    pub confusion: Confusion,
}

impl CvResult {
    pub fn scores(&self) -> Vec<f64> {
        self.predictions.iter().map(|p| p.score).collect()
    }

    pub fn labels(&self) -> Vec<SuccessLabel> {
        self.predictions.iter().map(|p| p.label).collect()
    }
}

/// Fits one model per held-out row; each fold refits standardization on its
/// own training rows. Folds run in parallel on the current rayon pool and
/// are collected in row order.
pub fn loo_cv(d: &Dataset, cfg: &SvmConfig) -> Result<CvResult, PredictorError> {
    if d.len() < 3 {
        return Err(PredictorError::TooFewRows(d.len()));
    }
    let (pos, neg) = d.class_counts();
    if pos == 0 || neg == 0 {
        return Err(PredictorError::SingleClass);
    }
    let folds: Vec<Result<Option<Prediction>, PredictorError>> = (0..d.len())
        .into_par_iter()
        .map(|i| {
            let train = d.without_row(i);
            let model = match train_linear_svm(&train, cfg) {
                Ok(m) => m,
                Err(PredictorError::SingleClass) => return Ok(None),
                Err(e) => return Err(e),
            };
            let row = &d.rows[i];
            let score = model.decision(&row.x);
            Ok(Some(Prediction {
                session_id: row.session_id.clone(),
                label: row.y,
                score,
                predicted: SuccessLabel::from_bool(score >= 0.0),
            }))
        })
        .collect();
    let mut predictions = Vec::with_capacity(d.len());
    let mut skipped = Vec::new();
    for (i, f) in folds.into_iter().enumerate() {
        match f? {
            Some(p) => predictions.push(p),
            None => skipped.push(d.rows[i].session_id.clone()),
        }
    }
    let mut confusion = Confusion::default();
    for p in &predictions {
        match (p.label.is_success(), p.predicted.is_success()) {
            (true, true) => confusion.tp += 1,
            (false, true) => confusion.fp += 1,
            (false, false) => confusion.tn += 1,
            (true, false) => confusion.fn_ += 1,
        }
    }
    let accuracy = if predictions.is_empty() {
        0.0
    } else {
        (confusion.tp + confusion.tn) as f64 / predictions.len() as f64
    };
    Ok(CvResult {
        predictions,
        skipped,
        accuracy,
        confusion,
    })
}
