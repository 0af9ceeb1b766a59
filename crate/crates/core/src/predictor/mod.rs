//! Success prediction: linear SVM, leave-one-out evaluation, ROC/AUC and
//! weight-based feature selection.

pub mod cv;
pub mod dataset;
pub mod pipeline;
pub mod roc;
pub mod select;
pub mod svm;

use thiserror::Error;

pub use cv::{loo_cv, Confusion, CvResult, Prediction};
pub use dataset::{read_labels_csv, write_labels_csv, Dataset, Dropped, FeatureTable, Row, Scaler};
pub use pipeline::{evaluate_pipeline, mode_columns, EvaluationReport, Mode, ModeResult, ModeTiming};
pub use roc::{roc_auc, RocCurve};
pub use select::{correlation, select_features, FeatureSubset, PrunedFeature, RankedFeature};
pub use svm::{solve_dual, train_linear_svm, DualSolution, SvmModel};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PredictorError {
    #[error("empty dataset")]
    EmptyDataset,
    #[error("only one class present")]
    SingleClass,
    #[error("need at least 3 rows, got {0}")]
    TooFewRows(usize),
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("unknown feature {0}")]
    UnknownFeature(String),
    #[error("no feature columns for mode {0}")]
    NoFeatures(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("csv: {0}")]
    Csv(String),
}

impl From<csv::Error> for PredictorError {
    fn from(e: csv::Error) -> Self {
        PredictorError::Csv(e.to_string())
    }
}
