//! IMPACT and SURVEY scoring, success labels and self-awareness categories.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::session_store::{resample_events, SampledSeries, Session};

/// Inclusive SURVEY threshold for a successful conversation.
pub const SUCCESS_THRESHOLD: f64 = 7.0;
/// Inhabiter scores below this are excluded from estimator analysis.
pub const ESTIMATOR_FLOOR: f64 = 2.5;
/// Inhabiter scores above this are excluded from estimator analysis.
pub const ESTIMATOR_CEILING: f64 = 8.5;
/// Largest self/inhabiter gap still counted as accurate.
pub const ACCURATE_GAP: f64 = 1.0;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("empty series")]
    EmptySeries,
    #[error("{name} = {value} outside 1..=10")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("session has no {0} stream")]
    MissingStream(&'static str),
}

/// Net positive seconds plus the time spent in each rating state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImpactScore {
    pub value: f64,
    pub positive_s: f64,
    pub neutral_s: f64,
    pub negative_s: f64,
}

/// Signed seconds: each frame contributes its valence times its duration.
pub fn impact_score(series: &SampledSeries) -> Result<ImpactScore, MetricsError> {
    if series.is_empty() {
        return Err(MetricsError::EmptySeries);
    }
    let (mut pos, mut neu, mut neg) = (0.0, 0.0, 0.0);
    for (k, &v) in series.values.iter().enumerate() {
        let w = series.frame_weight(k);
        match v.signum() {
            1 => pos += w,
            -1 => neg += w,
            _ => neu += w,
        }
    }
    Ok(ImpactScore {
        value: pos - neg,
        positive_s: pos,
        neutral_s: neu,
        negative_s: neg,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurveySource {
    Inhabiter,
    Participant,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurveyScore {
    pub value: f64,
    pub source: SurveySource,
}

fn check_item(name: &'static str, value: f64) -> Result<f64, MetricsError> {
    if (1.0..=10.0).contains(&value) {
        Ok(value)
    } else {
        Err(MetricsError::OutOfRange { name, value })
    }
}

/// Mean of the inhabiter's two goal-attainment items.
pub fn survey_inhabiter(item1: f64, item2: f64) -> Result<SurveyScore, MetricsError> {
    let a = check_item("survey_i_item1", item1)?;
    let b = check_item("survey_i_item2", item2)?;
    Ok(SurveyScore {
        value: (a + b) / 2.0,
        source: SurveySource::Inhabiter,
    })
}

pub fn survey_participant(item: f64) -> Result<SurveyScore, MetricsError> {
    Ok(SurveyScore {
        value: check_item("survey_p", item)?,
        source: SurveySource::Participant,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuccessLabel {
    Successful,
    Unsuccessful,
}

impl SuccessLabel {
    pub fn is_success(self) -> bool {
        self == Self::Successful
    }

    pub fn from_bool(success: bool) -> Self {
        if success {
            Self::Successful
        } else {
            Self::Unsuccessful
        }
    }
}

pub fn classify_success(s: SurveyScore) -> SuccessLabel {
    SuccessLabel::from_bool(s.value >= SUCCESS_THRESHOLD)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorClass {
    Accurate,
    OverEstimator,
    UnderEstimator,
    Excluded,
}

impl EstimatorClass {
    pub const ALL: [EstimatorClass; 4] = [
        Self::Accurate,
        Self::OverEstimator,
        Self::UnderEstimator,
        Self::Excluded,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Accurate => "accurate",
            Self::OverEstimator => "over_estimator",
            Self::UnderEstimator => "under_estimator",
            Self::Excluded => "excluded",
        }
    }
}

/// Compares a participant's self-estimate with the inhabiter's score.
/// Floor/ceiling exclusion takes precedence; otherwise a gap of at most one
/// point is accurate.
pub fn estimator_category(self_estimate: f64, inhabiter: SurveyScore) -> Result<EstimatorClass, MetricsError> {
    let own = check_item("self_estimate", self_estimate)?;
    let theirs = inhabiter.value;
    if !(ESTIMATOR_FLOOR..=ESTIMATOR_CEILING).contains(&theirs) {
        return Ok(EstimatorClass::Excluded);
    }
    let gap = own - theirs;
    Ok(if gap.abs() <= ACCURATE_GAP {
        EstimatorClass::Accurate
    } else if gap > 0.0 {
        EstimatorClass::OverEstimator
    } else {
        EstimatorClass::UnderEstimator
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dwell {
    pub pos: f64,
    pub neu: f64,
    pub neg: f64,
}

/// Per-session metric record, one JSON object per line in `metrics.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionMetrics {
    pub session_id: String,
    pub participant_id: String,
    pub scenario_id: u8,
    pub impact_score: f64,
    pub dwell_s: Dwell,
    pub survey_i: f64,
    pub survey_p: f64,
    pub success: SuccessLabel,
    pub self_estimate: Option<f64>,
    pub estimator_class: Option<EstimatorClass>,
    /// Self-assessed IMPACT from the replay pass, when present.
    pub self_impact_score: Option<f64>,
}

/// Scores one session with its IMPACT stream held at `rate` Hz. The
/// self-assessment stream, when present, is scored the same way.
pub fn session_metrics(s: &Session, rate: f64) -> Result<SessionMetrics, MetricsError> {
    let events = s.impact_events.as_ref().ok_or(MetricsError::MissingStream("impact"))?;
    let survey = s.survey.as_ref().ok_or(MetricsError::MissingStream("survey"))?;
    if !(s.duration > 0.0) {
        return Err(MetricsError::EmptySeries);
    }
    let score = impact_score(&resample_events(events, s.duration, rate))?;
    let inhabiter = survey_inhabiter(survey.survey_i_item1, survey.survey_i_item2)?;
    let participant = survey_participant(survey.survey_p)?;
    let estimator_class = match survey.self_estimate {
        Some(v) => Some(estimator_category(v, inhabiter)?),
        None => None,
    };
    let self_impact_score = match &s.self_events {
        Some(e) => Some(impact_score(&resample_events(e, s.duration, rate))?.value),
        None => None,
    };
    Ok(SessionMetrics {
        session_id: s.session_id.clone(),
        participant_id: s.participant_id.clone(),
        scenario_id: s.scenario_id,
        impact_score: score.value,
        dwell_s: Dwell {
            pos: score.positive_s,
            neu: score.neutral_s,
            neg: score.negative_s,
        },
        survey_i: inhabiter.value,
        survey_p: participant.value,
        success: classify_success(inhabiter),
        self_estimate: survey.self_estimate,
        estimator_class,
        self_impact_score,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inhabiter(v: f64) -> SurveyScore {
        SurveyScore {
            value: v,
            source: SurveySource::Inhabiter,
        }
    }

    #[test]
    fn all_positive_six_minutes() {
        let s = impact_score(&SampledSeries::new(30.0, vec![1; 360 * 30])).unwrap();
        assert!((s.value - 360.0).abs() < 1e-9);
        assert!((s.positive_s - 360.0).abs() < 1e-9);
    }

    #[test]
    fn all_neutral_scores_zero() {
        let s = impact_score(&SampledSeries::new(30.0, vec![0; 300])).unwrap();
        assert_eq!(s.value, 0.0);
        assert!((s.neutral_s - 10.0).abs() < 1e-12);
    }

    #[test]
    fn mixed_dwell() {
        let mut v = vec![1i8; 200 * 30];
        v.extend(vec![-1i8; 100 * 30]);
        v.extend(vec![0i8; 60 * 30]);
        let s = impact_score(&SampledSeries::new(30.0, v)).unwrap();
        assert!((s.value - 100.0).abs() < 1e-9);
    }

    #[test]
    fn empty_series_rejected() {
        assert_eq!(impact_score(&SampledSeries::new(30.0, vec![])), Err(MetricsError::EmptySeries));
    }

    #[test]
    fn partial_last_frame_is_clipped() {
        let s = SampledSeries {
            rate: 30.0,
            t0: 0.0,
            duration: 1.01,
            values: vec![1; 31],
        };
        let score = impact_score(&s).unwrap();
        assert!((score.value - 1.01).abs() < 1e-12);
    }

    #[test]
    fn inhabiter_means() {
        assert_eq!(survey_inhabiter(10.0, 10.0).unwrap().value, 10.0);
        assert_eq!(survey_inhabiter(9.0, 5.0).unwrap().value, 7.0);
        assert_eq!(survey_inhabiter(1.0, 10.0).unwrap().value, 5.5);
        assert!(survey_inhabiter(0.0, 5.0).is_err());
    }

    #[test]
    fn participant_item() {
        assert_eq!(survey_participant(7.0).unwrap().value, 7.0);
        assert_eq!(survey_participant(1.0).unwrap().source, SurveySource::Participant);
        assert_eq!(
            survey_participant(10.5),
            Err(MetricsError::OutOfRange { name: "survey_p", value: 10.5 })
        );
    }

    #[test]
    fn success_threshold_inclusive() {
        assert_eq!(classify_success(inhabiter(7.0)), SuccessLabel::Successful);
        assert_eq!(classify_success(inhabiter(6.99)), SuccessLabel::Unsuccessful);
        assert_eq!(classify_success(inhabiter(1.0)), SuccessLabel::Unsuccessful);
    }

    #[test]
    fn estimator_examples() {
        use EstimatorClass::*;
        assert_eq!(estimator_category(7.0, inhabiter(6.0)), Ok(Accurate));
        assert_eq!(estimator_category(8.0, inhabiter(5.0)), Ok(OverEstimator));
        assert_eq!(estimator_category(3.0, inhabiter(2.0)), Ok(Excluded));
        assert_eq!(estimator_category(5.0, inhabiter(9.0)), Ok(Excluded));
        assert_eq!(estimator_category(3.0, inhabiter(6.0)), Ok(UnderEstimator));
        assert_eq!(estimator_category(6.5, inhabiter(5.0)), Ok(OverEstimator));
        assert!(estimator_category(11.0, inhabiter(5.0)).is_err());
    }

    #[test]
    fn whole_session() {
        use crate::session_store::{EventStream, ImpactValue, SurveyResponses};
        let mut s = Session::empty("s1", "p1", 2, 10.0);
        s.impact_events = Some(
            EventStream::from_pairs(&[(2.0, ImpactValue::Positive), (5.0, ImpactValue::EoiPositive), (6.0, ImpactValue::Negative)])
                .unwrap(),
        );
        s.self_events = Some(EventStream::from_pairs(&[(0.0, ImpactValue::Positive)]).unwrap());
        s.survey = Some(SurveyResponses {
            survey_i_item1: 8.0,
            survey_i_item2: 6.0,
            survey_p: 9.0,
            self_estimate: Some(9.0),
        });
        let m = session_metrics(&s, 30.0).unwrap();
        assert!((m.impact_score - 0.0).abs() < 1e-9);
        assert!((m.dwell_s.pos - 4.0).abs() < 1e-9 && (m.dwell_s.neg - 4.0).abs() < 1e-9);
        assert_eq!(m.success, SuccessLabel::Successful);
        assert_eq!(m.estimator_class, Some(EstimatorClass::OverEstimator));
        assert!((m.self_impact_score.unwrap() - 10.0).abs() < 1e-9);
        s.survey = None;
        assert_eq!(session_metrics(&s, 30.0), Err(MetricsError::MissingStream("survey")));
    }
}
