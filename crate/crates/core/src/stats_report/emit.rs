//! Writes the report directory: one JSON summary plus plot-ready CSVs.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::emotion_space::{write_trajectory_csv, Trajectory, TrajectorySummary};
use crate::impact_metrics::{SessionMetrics, SuccessLabel};
use crate::predictor::RocCurve;

use super::cohort::{
    estimator_breakdown, group_summary, scenario_correlations, success_transition_table, EstimatorBreakdown,
    GroupSummary, ScenarioCorrelation,
};
use super::inference::{chi_square_2x2, ChiSquareResult, ContingencyTable2x2};
use super::StatsError;

/// Files always present in a report directory.
pub const REPORT_FILES: [&str; 6] = [
    "report.json",
    "correlations.csv",
    "group_means.csv",
    "transition_table.csv",
    "estimator_breakdown.csv",
    "metrics.jsonl",
];

pub struct ReportInputs<'a> {
    /// Resolved configuration, echoed verbatim.
    pub config: serde_json::Value,
    pub metrics: &'a [SessionMetrics],
    /// Sessions left out of the analysis, with reasons.
    pub excluded: Vec<(String, String)>,
    pub trajectories: Vec<(String, Trajectory)>,
    pub k_sigma: f64,
    /// Per-mode ROC curves, written as `roc_<mode>.csv`.
    pub rocs: Vec<(String, RocCurve)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcludedSession {
    pub session_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionSection {
    pub table: ContingencyTable2x2,
    pub chi_square: Option<ChiSquareResult>,
}

/// Mean IMPACT at Scenario 4 minus Scenario 1 for one group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupDelta {
    pub group: SuccessLabel,
    pub delta_s4_s1: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: serde_json::Value,
    pub n_sessions: usize,
    pub excluded_sessions: Vec<ExcludedSession>,
    pub correlations: Vec<ScenarioCorrelation>,
    pub group_summary: Option<GroupSummary>,
    pub group_deltas: Vec<GroupDelta>,
    pub transition: Option<TransitionSection>,
    pub estimator_breakdown: EstimatorBreakdown,
    pub trajectories: Vec<String>,
    pub roc_modes: Vec<String>,
    /// Sections that could not be computed, with the reason.
    pub errors: Vec<String>,
}

impl Report {
    pub fn is_empty(&self) -> bool {
        self.n_sessions == 0
    }
}

pub fn build_report(inputs: &ReportInputs) -> Report {
    let mut errors = Vec::new();
    let metrics = inputs.metrics;
    let groups = match group_summary(metrics) {
        Ok(g) => Some(g),
        Err(e) => {
            errors.push(format!("group_summary: {e}"));
            None
        }
    };
    let group_deltas = groups
        .as_ref()
        .map(|g| {
            [SuccessLabel::Successful, SuccessLabel::Unsuccessful]
                .into_iter()
                .map(|group| {
                    let mean = |sc: u8| {
                        g.cells
                            .iter()
                            .find(|c| c.group == group && c.scenario == sc)
                            .and_then(|c| c.mean_impact)
                    };
                    GroupDelta {
                        group,
                        delta_s4_s1: mean(4).zip(mean(1)).map(|(a, b)| a - b),
                    }
                })
                .collect()
        })
        .unwrap_or_default();
    let transition = match success_transition_table(metrics) {
        Ok(table) => {
            let chi_square = match chi_square_2x2(&table) {
                Ok(c) => Some(c),
                Err(e) => {
                    errors.push(format!("chi_square: {e}"));
                    None
                }
            };
            Some(TransitionSection { table, chi_square })
        }
        Err(e) => {
            errors.push(format!("transition_table: {e}"));
            None
        }
    };
    let correlations = scenario_correlations(metrics);
    for c in &correlations {
        if let Some(e) = &c.error {
            errors.push(format!("correlation scenario {} {}: {e}", c.scenario, c.survey));
        }
    }
    Report {
        config: inputs.config.clone(),
        n_sessions: metrics.len(),
        excluded_sessions: inputs
            .excluded
            .iter()
            .map(|(id, reason)| ExcludedSession {
                session_id: id.clone(),
                reason: reason.clone(),
            })
            .collect(),
        correlations,
        group_summary: groups,
        group_deltas,
        transition,
        estimator_breakdown: estimator_breakdown(metrics),
        trajectories: inputs.trajectories.iter().map(|(id, _)| id.clone()).collect(),
        roc_modes: inputs.rocs.iter().map(|(m, _)| m.clone()).collect(),
        errors,
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn write(dir: &Path, name: &str, contents: &[u8]) -> Result<(), StatsError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| StatsError::Io(format!("{}: {e}", path.display())))
}

fn correlations_csv(rows: &[ScenarioCorrelation]) -> String {
    let mut s = String::from("scenario,survey,n,r,p_two_sided,p_adjusted\n");
    for c in rows {
        let r = c.result;
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            c.scenario,
            c.survey,
            r.map(|r| r.n.to_string()).unwrap_or_default(),
            opt(r.map(|r| r.r)),
            opt(r.map(|r| r.p_two_sided)),
            opt(c.p_adjusted)
        );
    }
    s
}

fn group_means_csv(g: Option<&GroupSummary>) -> String {
    let mut s = String::from("group,scenario,n,mean_impact,se\n");
    for c in g.map(|g| g.cells.as_slice()).unwrap_or_default() {
        let label = if c.group.is_success() { "successful" } else { "unsuccessful" };
        let _ = writeln!(s, "{label},{},{},{},{}", c.scenario, c.n, opt(c.mean_impact), opt(c.se));
    }
    s
}

fn transition_csv(t: Option<&TransitionSection>) -> String {
    let mut s = String::from("scenario1,scenario4_successful,scenario4_unsuccessful\n");
    if let Some(t) = t {
        let r = t.table.rows();
        let _ = writeln!(s, "successful,{},{}", r[0][0], r[0][1]);
        let _ = writeln!(s, "unsuccessful,{},{}", r[1][0], r[1][1]);
    }
    s
}

fn estimator_csv(b: &EstimatorBreakdown) -> String {
    let mut s = String::from("class,n,n_successful,success_rate\n");
    for r in &b.categories {
        let _ = writeln!(s, "{},{},{},{}", r.class.as_str(), r.n, r.n_successful, r.success_rate);
    }
    s
}

/// Writes every report file into `dir` (created if needed) and returns the
/// summary. An empty cohort still produces every file, with empty sections.
pub fn emit_report(dir: &Path, inputs: &ReportInputs) -> Result<Report, StatsError> {
    fs::create_dir_all(dir).map_err(|e| StatsError::Io(format!("{}: {e}", dir.display())))?;
    let mut report = build_report(inputs);

    let mut jsonl = String::new();
    for m in inputs.metrics {
        jsonl.push_str(&serde_json::to_string(m).expect("metrics serialize"));
        jsonl.push('\n');
    }
    write(dir, "metrics.jsonl", jsonl.as_bytes())?;
    write(dir, "correlations.csv", correlations_csv(&report.correlations).as_bytes())?;
    write(dir, "group_means.csv", group_means_csv(report.group_summary.as_ref()).as_bytes())?;
    write(dir, "transition_table.csv", transition_csv(report.transition.as_ref()).as_bytes())?;
    write(dir, "estimator_breakdown.csv", estimator_csv(&report.estimator_breakdown).as_bytes())?;

    if !inputs.trajectories.is_empty() {
        let tdir = dir.join("trajectories");
        fs::create_dir_all(&tdir).map_err(|e| StatsError::Io(format!("{}: {e}", tdir.display())))?;
        for (id, tr) in &inputs.trajectories {
            let mut csv = Vec::new();
            write_trajectory_csv(&mut csv, tr).map_err(|e| StatsError::Io(e.to_string()))?;
            write(&tdir, &format!("{id}.csv"), &csv)?;
            match TrajectorySummary::compute(tr, inputs.k_sigma) {
                Ok(summary) => write(
                    &tdir,
                    &format!("{id}.json"),
                    serde_json::to_string_pretty(&summary).expect("summary serializes").as_bytes(),
                )?,
                Err(e) => report.errors.push(format!("trajectory {id}: {e}")),
            }
        }
    }
    for (mode, roc) in &inputs.rocs {
        let mut s = String::from("fpr,tpr\n");
        for (x, y) in &roc.points {
            let _ = writeln!(s, "{x},{y}");
        }
        write(dir, &format!("roc_{mode}.csv"), s.as_bytes())?;
    }
    let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
    json.push('\n');
    write(dir, "report.json", json.as_bytes())?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emotion_space::TrajectoryPoint;
    use crate::impact_metrics::Dwell;

    fn metrics() -> Vec<SessionMetrics> {
        let mut out = Vec::new();
        for p in 0..6 {
            for sc in 1..=4u8 {
                let success = (p + sc as usize) % 3 != 0;
                out.push(SessionMetrics {
                    session_id: format!("p{p}-s{sc}"),
                    participant_id: format!("p{p}"),
                    scenario_id: sc,
                    impact_score: (p * 10 + sc as usize) as f64,
                    dwell_s: Dwell { pos: 1.0, neu: 1.0, neg: 1.0 },
                    survey_i: if success { 8.0 } else { 3.0 + p as f64 * 0.5 },
                    survey_p: 2.0 + ((p * sc as usize) % 7) as f64,
                    success: SuccessLabel::from_bool(success),
                    self_estimate: None,
                    estimator_class: None,
                    self_impact_score: None,
                });
            }
        }
        out
    }

    fn inputs(m: &[SessionMetrics]) -> ReportInputs<'_> {
        ReportInputs {
            config: serde_json::json!({"k": 1}),
            metrics: m,
            excluded: vec![("bad".into(), "missing impact".into())],
            trajectories: vec![(
                "p0-s1".into(),
                Trajectory {
                    points: vec![
                        TrajectoryPoint { t_norm: 0.0, v: [0.0, 0.0] },
                        TrajectoryPoint { t_norm: 0.5, v: [1.0, 0.5] },
                        TrajectoryPoint { t_norm: 1.0, v: [0.2, 1.0] },
                    ],
                },
            )],
            k_sigma: 2.0,
            rocs: vec![(
                "full".into(),
                RocCurve {
                    points: vec![(0.0, 0.0), (0.0, 1.0), (1.0, 1.0)],
                    auc: 1.0,
                },
            )],
        }
    }

    #[test]
    fn all_files_written_and_stable() {
        let m = metrics();
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let report = emit_report(a.path(), &inputs(&m)).unwrap();
        emit_report(b.path(), &inputs(&m)).unwrap();
        assert!(!report.is_empty());
        assert!(report.group_summary.is_some() && report.transition.is_some());
        let mut names: Vec<String> = REPORT_FILES.iter().map(|s| s.to_string()).collect();
        names.extend(["roc_full.csv", "trajectories/p0-s1.csv", "trajectories/p0-s1.json"].map(String::from));
        for name in names {
            let x = fs::read(a.path().join(&name)).unwrap();
            assert_eq!(x, fs::read(b.path().join(&name)).unwrap(), "{name}");
        }
        let groups = fs::read_to_string(a.path().join("group_means.csv")).unwrap();
        assert_eq!(groups.lines().count(), 9);
    }

    #[test]
    fn empty_cohort_has_explicit_sections() {
        let d = tempfile::tempdir().unwrap();
        let mut inp = inputs(&[]);
        inp.trajectories.clear();
        inp.rocs.clear();
        let report = emit_report(d.path(), &inp).unwrap();
        assert!(report.is_empty());
        assert!(report.group_summary.is_none() && report.transition.is_none());
        assert!(!report.errors.is_empty());
        for f in REPORT_FILES {
            assert!(d.path().join(f).exists(), "{f}");
        }
        let v: serde_json::Value = serde_json::from_slice(&fs::read(d.path().join("report.json")).unwrap()).unwrap();
        assert!(v["group_summary"].is_null());
        assert_eq!(v["estimator_breakdown"]["categories"], serde_json::json!([]));
    }
}
