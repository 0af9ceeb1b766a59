//! Cohort statistics and report emission.

pub mod cohort;
pub mod emit;
pub mod inference;

use thiserror::Error;

pub use cohort::{
    complete_participants, estimator_breakdown, group_summary, scenario_correlations, success_transition_table,
    EstimatorBreakdown, EstimatorRow, GroupCell, GroupSummary, ScenarioCorrelation,
};
pub use emit::{build_report, emit_report, Report, ReportInputs, REPORT_FILES};
pub use inference::{
    chi_square_2x2, pearson, stepdown_adjust, ChiSquareResult, ContingencyTable2x2, CorrelationResult,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("input is constant")]
    ConstantInput,
    #[error("contingency table has an empty row or column")]
    ZeroMargin,
    #[error("p-value {0} outside [0, 1]")]
    OutOfRange(f64),
    #[error("no participant has sessions in all four scenarios")]
    NoCompleteParticipants,
    #[error("{0}")]
    Io(String),
}
