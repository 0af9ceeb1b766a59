//! Cohort summaries over per-session metrics.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::impact_metrics::{EstimatorClass, SessionMetrics, SuccessLabel};

use super::inference::{pearson, stepdown_adjust, ContingencyTable2x2, CorrelationResult};
use super::StatsError;

pub const SCENARIOS: [u8; 4] = [1, 2, 3, 4];

/// Participants with exactly one session in every scenario, each mapped to
/// their sessions in scenario order. Everyone else is listed as excluded.
pub fn complete_participants(metrics: &[SessionMetrics]) -> (BTreeMap<&str, [&SessionMetrics; 4]>, Vec<String>) {
    let mut by: BTreeMap<&str, Vec<&SessionMetrics>> = BTreeMap::new();
    for m in metrics {
        by.entry(m.participant_id.as_str()).or_default().push(m);
    }
    let mut complete = BTreeMap::new();
    let mut excluded = Vec::new();
    for (pid, sessions) in by {
        let slots: Vec<Vec<&SessionMetrics>> = SCENARIOS
            .iter()
            .map(|&sc| sessions.iter().copied().filter(|m| m.scenario_id == sc).collect())
            .collect();
        if sessions.len() == 4 && slots.iter().all(|s| s.len() == 1) {
            complete.insert(pid, [slots[0][0], slots[1][0], slots[2][0], slots[3][0]]);
        } else {
            excluded.push(pid.to_string());
        }
    }
    (complete, excluded)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupCell {
    /// Scenario-1 success status.
    pub group: SuccessLabel,
    pub scenario: u8,
    pub n: usize,
    pub mean_impact: Option<f64>,
    /// Sample sd / sqrt(n); absent for n < 2.
    pub se: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub cells: Vec<GroupCell>,
    pub excluded_participants: Vec<String>,
}

/// Mean IMPACT and standard error per (Scenario-1 group, scenario), over
/// participants with complete data.
pub fn group_summary(metrics: &[SessionMetrics]) -> Result<GroupSummary, StatsError> {
    let (complete, excluded) = complete_participants(metrics);
    if complete.is_empty() {
        return Err(StatsError::NoCompleteParticipants);
    }
    let mut cells = Vec::new();
    for group in [SuccessLabel::Successful, SuccessLabel::Unsuccessful] {
        let members: Vec<&[&SessionMetrics; 4]> = complete.values().filter(|s| s[0].success == group).collect();
        for (k, &scenario) in SCENARIOS.iter().enumerate() {
            let v: Vec<f64> = members.iter().map(|s| s[k].impact_score).collect();
            let n = v.len();
            let mean = (n > 0).then(|| v.iter().sum::<f64>() / n as f64);
            let se = mean.filter(|_| n >= 2).map(|m| {
                let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
                (var / n as f64).sqrt()
            });
            cells.push(GroupCell {
                group,
                scenario,
                n,
                mean_impact: mean,
                se,
            });
        }
    }
    Ok(GroupSummary {
        cells,
        excluded_participants: excluded,
    })
}

/// Scenario-1 status by Scenario-4 status over complete participants.
pub fn success_transition_table(metrics: &[SessionMetrics]) -> Result<ContingencyTable2x2, StatsError> {
    let (complete, _) = complete_participants(metrics);
    if complete.is_empty() {
        return Err(StatsError::NoCompleteParticipants);
    }
    let mut rows = [[0u64; 2]; 2];
    for s in complete.values() {
        let r = usize::from(!s[0].success.is_success());
        let c = usize::from(!s[3].success.is_success());
        rows[r][c] += 1;
    }
    Ok(ContingencyTable2x2::from_rows(rows))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorRow {
    pub class: EstimatorClass,
    pub n: usize,
    pub n_successful: usize,
    pub success_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorBreakdown {
    /// Non-empty categories among accurate, over and under estimators.
    pub categories: Vec<EstimatorRow>,
    pub excluded: usize,
    pub without_self_estimate: usize,
}

/// Success proportion per self-awareness category.
pub fn estimator_breakdown(metrics: &[SessionMetrics]) -> EstimatorBreakdown {
    let mut counts: BTreeMap<EstimatorClass, (usize, usize)> = BTreeMap::new();
    let mut excluded = 0;
    let mut without = 0;
    for m in metrics {
        match m.estimator_class {
            None => without += 1,
            Some(EstimatorClass::Excluded) => excluded += 1,
            Some(c) => {
                let e = counts.entry(c).or_default();
                e.0 += 1;
                e.1 += usize::from(m.success.is_success());
            }
        }
    }
    EstimatorBreakdown {
        categories: counts
            .into_iter()
            .map(|(class, (n, s))| EstimatorRow {
                class,
                n,
                n_successful: s,
                success_rate: s as f64 / n as f64,
            })
            .collect(),
        excluded,
        without_self_estimate: without,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioCorrelation {
    pub scenario: u8,
    /// `survey_i` or `survey_p`.
    pub survey: String,
    pub result: Option<CorrelationResult>,
    /// Holm-adjusted across every computed correlation in the family.
    pub p_adjusted: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// IMPACT vs. SURVEY-I and SURVEY-P per scenario, with Holm adjustment over
/// the family of correlations that could be computed.
pub fn scenario_correlations(metrics: &[SessionMetrics]) -> Vec<ScenarioCorrelation> {
    let mut out = Vec::new();
    for &scenario in &SCENARIOS {
        let rows: Vec<&SessionMetrics> = metrics.iter().filter(|m| m.scenario_id == scenario).collect();
        let impact: Vec<f64> = rows.iter().map(|m| m.impact_score).collect();
        for survey in ["survey_i", "survey_p"] {
            let s: Vec<f64> = rows
                .iter()
                .map(|m| if survey == "survey_i" { m.survey_i } else { m.survey_p })
                .collect();
            let (result, error) = match pearson(&impact, &s) {
                Ok(r) => (Some(r), None),
                Err(e) => (None, Some(e.to_string())),
            };
            out.push(ScenarioCorrelation {
                scenario,
                survey: survey.to_string(),
                result,
                p_adjusted: None,
                error,
            });
        }
    }
    let ps: Vec<f64> = out.iter().filter_map(|c| c.result.map(|r| r.p_two_sided)).collect();
    let adjusted = stepdown_adjust(&ps).expect("p-values in range");
    let mut it = adjusted.into_iter();
    for c in out.iter_mut().filter(|c| c.result.is_some()) {
        c.p_adjusted = it.next();
    }
    out
}
