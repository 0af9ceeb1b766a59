//! Per-mode evaluation: audio, video, both, or the selected audio subset.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::audio_dsp::feature_index;
use crate::config::SvmConfig;
use crate::emotion_space::VIDEO_FEATURES;
use crate::impact_metrics::SuccessLabel;

use super::cv::{loo_cv, CvResult};
use super::dataset::{Dataset, Dropped, FeatureTable};
use super::roc::{roc_auc, RocCurve};
use super::select::{select_features, FeatureSubset};
use super::PredictorError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Full,
    AudioOnly,
    VideoOnly,
    TopSelected,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::Full, Mode::AudioOnly, Mode::VideoOnly, Mode::TopSelected];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Full => "full",
            Mode::AudioOnly => "audio_only",
            Mode::VideoOnly => "video_only",
            Mode::TopSelected => "top_selected",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = PredictorError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| PredictorError::InvalidParameter(format!("unknown mode {s:?}")))
    }
}

pub fn is_audio_feature(name: &str) -> bool {
    feature_index(name).is_some()
}

pub fn is_video_feature(name: &str) -> bool {
    VIDEO_FEATURES.contains(&name)
}

/// Columns of `table` used by a mode (before selection).
pub fn mode_columns(table: &FeatureTable, mode: Mode) -> Vec<&str> {
    table
        .feature_names
        .iter()
        .map(String::as_str)
        .filter(|n| match mode {
            Mode::Full => true,
            Mode::AudioOnly | Mode::TopSelected => is_audio_feature(n),
            Mode::VideoOnly => is_video_feature(n),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeResult {
    pub mode: Mode,
    pub features: Vec<String>,
    pub n_rows: usize,
    pub dropped: Dropped,
    pub accuracy: Option<f64>,
    pub auc: Option<f64>,
    pub roc: Option<RocCurve>,
    pub cv: Option<CvResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub svm: SvmConfig,
    pub modes: Vec<ModeResult>,
    pub selection: Option<FeatureSubset>,
}

/// Wall-clock preparation plus cross-validation time per mode. Kept apart
/// from the report so the report stays reproducible.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeTiming {
    pub mode: Mode,
    pub seconds: f64,
}

fn run_mode(
    table: &FeatureTable,
    labels: &BTreeMap<String, SuccessLabel>,
    mode: Mode,
    cfg: &SvmConfig,
    selection: &mut Option<FeatureSubset>,
) -> Result<ModeResult, PredictorError> {
    let cols = mode_columns(table, mode);
    if cols.is_empty() {
        return Err(PredictorError::NoFeatures(mode.to_string()));
    }
    let (mut d, dropped) = Dataset::from_table(&table.select(&cols)?, labels);
    if mode == Mode::TopSelected {
        let subset = select_features(&d, cfg)?;
        let names: Vec<&str> = subset.selected.iter().map(String::as_str).collect();
        d = d.select(&names)?;
        *selection = Some(subset);
    }
    let cv = loo_cv(&d, cfg)?;
    let roc = roc_auc(&cv.scores(), &cv.labels()).ok();
    Ok(ModeResult {
        mode,
        features: d.feature_names.clone(),
        n_rows: d.len(),
        dropped,
        accuracy: Some(cv.accuracy),
        auc: roc.as_ref().map(|r| r.auc),
        roc,
        cv: Some(cv),
        error: None,
    })
}

/// Runs LOO for each requested mode. A mode that cannot run (no columns,
/// one class, too few rows) is reported with its error instead of aborting
/// the others. Selection for `top_selected` uses every complete audio row.
pub fn evaluate_pipeline(
    table: &FeatureTable,
    labels: &BTreeMap<String, SuccessLabel>,
    modes: &[Mode],
    cfg: &SvmConfig,
) -> (EvaluationReport, Vec<ModeTiming>) {
    let mut results = Vec::new();
    let mut timings = Vec::new();
    let mut selection = None;
    for &mode in modes {
        let start = Instant::now();
        let r = run_mode(table, labels, mode, cfg, &mut selection).unwrap_or_else(|e| ModeResult {
            mode,
            features: Vec::new(),
            n_rows: 0,
            dropped: Dropped::default(),
            accuracy: None,
            auc: None,
            roc: None,
            cv: None,
            error: Some(e.to_string()),
        });
        timings.push(ModeTiming {
            mode,
            seconds: start.elapsed().as_secs_f64(),
        });
        results.push(r);
    }
    (
        EvaluationReport {
            svm: cfg.clone(),
            modes: results,
            selection,
        },
        timings,
    )
}
