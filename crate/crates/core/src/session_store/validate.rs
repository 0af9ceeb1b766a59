use serde::{Deserialize, Serialize};

use super::model::{Session, StreamKind};

/// Largest tolerated gap between audio length and manifest duration, seconds.
pub const DURATION_TOLERANCE_S: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Warning,
    Fatal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Issue {
    pub severity: Severity,
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub session_id: String,
    pub issues: Vec<Issue>,
    pub usable: bool,
}

impl ValidationReport {
    pub fn new(session_id: &str, issues: Vec<Issue>) -> Self {
        let usable = issues.iter().all(|i| i.severity != Severity::Fatal);
        Self {
            session_id: session_id.to_string(),
            issues,
            usable,
        }
    }

    pub fn fatal_count(&self) -> usize {
        self.issues.iter().filter(|i| i.severity == Severity::Fatal).count()
    }
}

fn issue(severity: Severity, code: &str, message: String) -> Issue {
    Issue {
        severity,
        code: code.to_string(),
        message,
    }
}

fn in_scale(v: f64) -> bool {
    (1.0..=10.0).contains(&v)
}

/// Checks stream completeness and consistency. Never fails; every problem is
/// a report entry.
pub fn validate_session(s: &Session) -> ValidationReport {
    let mut issues = Vec::new();

    for (kind, file) in &s.missing_files {
        let severity = if kind.is_required() { Severity::Fatal } else { Severity::Warning };
        issues.push(issue(
            severity,
            "missing_file",
            format!("{kind} declared as `{file}` but not found"),
        ));
    }
    for kind in StreamKind::ALL {
        if s.has_stream(kind) || s.missing_files.iter().any(|(k, _)| *k == kind) {
            continue;
        }
        if kind.is_required() {
            issues.push(issue(Severity::Fatal, "missing_stream", format!("required stream {kind} is absent")));
        } else {
            issues.push(issue(Severity::Warning, "missing_stream", format!("optional stream {kind} is absent")));
        }
    }

    if let Some(audio) = &s.participant_audio {
        let gap = (audio.duration() - s.duration).abs();
        if gap > DURATION_TOLERANCE_S {
            issues.push(issue(
                Severity::Fatal,
                "duration_mismatch",
                format!(
                    "participant audio is {:.3} s but manifest says {:.3} s",
                    audio.duration(),
                    s.duration
                ),
            ));
        }
        if audio.samples.is_empty() {
            issues.push(issue(Severity::Fatal, "empty_audio", "participant audio has no samples".into()));
        }
    }

    if let Some(survey) = &s.survey {
        for (name, v) in [
            ("survey_i_item1", survey.survey_i_item1),
            ("survey_i_item2", survey.survey_i_item2),
            ("survey_p", survey.survey_p),
        ] {
            if !in_scale(v) {
                issues.push(issue(Severity::Fatal, "survey_out_of_range", format!("{name} = {v} outside 1..=10")));
            }
        }
        match survey.self_estimate {
            Some(v) if !in_scale(v) => issues.push(issue(
                Severity::Warning,
                "survey_out_of_range",
                format!("self_estimate = {v} outside 1..=10; ignored"),
            )),
            None => issues.push(issue(Severity::Warning, "missing_self_estimate", "no self_estimate in survey".into())),
            _ => {}
        }
    }

    ValidationReport::new(&s.session_id, issues)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::session_store::{AudioTrack, EventStream, SurveyResponses};

    fn complete(duration: f64, audio_s: f64) -> Session {
        let mut s = Session::empty("s1", "p1", 1, duration);
        s.participant_audio = Some(AudioTrack::unchecked(vec![0.0; (audio_s * 16000.0) as usize], 16000));
        s.inhabiter_audio = s.participant_audio.clone();
        s.emotion_frames = Some(vec![]);
        s.impact_events = Some(EventStream::default());
        s.eoi_events = Some(EventStream::default());
        s.self_events = Some(EventStream::default());
        s.survey = Some(SurveyResponses {
            survey_i_item1: 7.0,
            survey_i_item2: 8.0,
            survey_p: 6.0,
            self_estimate: Some(7.0),
        });
        s
    }

    #[test]
    fn complete_session_is_clean() {
        let r = validate_session(&complete(360.0, 360.0));
        assert!(r.usable);
        assert!(r.issues.is_empty(), "{:?}", r.issues);
    }

    #[test]
    fn missing_survey_is_fatal() {
        let mut s = complete(360.0, 360.0);
        s.survey = None;
        let r = validate_session(&s);
        assert!(!r.usable);
        assert_eq!(r.fatal_count(), 1);
    }

    #[test]
    fn half_second_short_audio_tolerated() {
        assert!(validate_session(&complete(360.0, 359.5)).issues.is_empty());
        let r = validate_session(&complete(360.0, 357.0));
        assert!(!r.usable);
        assert_eq!(r.issues[0].code, "duration_mismatch");
    }

    #[test]
    fn missing_self_events_is_warning() {
        let mut s = complete(360.0, 360.0);
        s.self_events = None;
        let r = validate_session(&s);
        assert!(r.usable);
        assert_eq!(r.issues.len(), 1);
        assert_eq!(r.issues[0].severity, Severity::Warning);
    }

    #[test]
    fn declared_but_missing_required_file_is_fatal() {
        let mut s = complete(360.0, 360.0);
        s.impact_events = None;
        s.missing_files.push((StreamKind::Impact, "impact.jsonl".into()));
        let r = validate_session(&s);
        assert!(!r.usable);
        assert_eq!(r.issues.len(), 1);
        assert_eq!(r.issues[0].code, "missing_file");
    }
}
