use std::fmt;

use serde::{Deserialize, Serialize};

use crate::emotion_space::EmotionFrame;

use super::SessionError;

pub const MIN_AUDIO_RATE_HZ: u32 = 16_000;
pub const MAX_AUDIO_RATE_HZ: u32 = 48_000;

/// A single rating state or event-of-interest marker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImpactValue {
    Positive,
    Neutral,
    Negative,
    /// Positive point of interest, wire code 4.
    EoiPositive,
    /// Negative point of interest, wire code 5.
    EoiNegative,
}

impl ImpactValue {
    /// +1 / 0 / -1 for the ordinal states, `None` for markers.
    pub fn valence(self) -> Option<i8> {
        match self {
            Self::Positive => Some(1),
            Self::Neutral => Some(0),
            Self::Negative => Some(-1),
            Self::EoiPositive | Self::EoiNegative => None,
        }
    }

    pub fn is_ordinal(self) -> bool {
        self.valence().is_some()
    }

    pub fn from_valence(v: i8) -> Option<Self> {
        match v {
            1 => Some(Self::Positive),
            0 => Some(Self::Neutral),
            -1 => Some(Self::Negative),
            _ => None,
        }
    }

    pub fn eoi_code(self) -> Option<u8> {
        match self {
            Self::EoiPositive => Some(4),
            Self::EoiNegative => Some(5),
            _ => None,
        }
    }

    pub fn from_eoi_code(code: u8) -> Option<Self> {
        match code {
            4 => Some(Self::EoiPositive),
            5 => Some(Self::EoiNegative),
            _ => None,
        }
    }

    pub fn wire_label(self) -> Option<&'static str> {
        match self {
            Self::Positive => Some("positive"),
            Self::Neutral => Some("neutral"),
            Self::Negative => Some("negative"),
            _ => None,
        }
    }

    pub fn from_wire_label(s: &str) -> Option<Self> {
        match s {
            "positive" => Some(Self::Positive),
            "neutral" => Some(Self::Neutral),
            "negative" => Some(Self::Negative),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    pub value: ImpactValue,
}

/// Timestamped events with strictly increasing times.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EventStream {
    events: Vec<Event>,
}

impl EventStream {
    pub fn new(events: Vec<Event>) -> Result<Self, SessionError> {
        for (i, e) in events.iter().enumerate() {
            if !e.t.is_finite() {
                return Err(SessionError::InvalidEvent(format!("event {i}: non-finite time")));
            }
            if i > 0 && e.t <= events[i - 1].t {
                return Err(SessionError::NonMonotonicTimestamps {
                    file: String::new(),
                    line: i + 1,
                });
            }
        }
        Ok(Self { events })
    }

    pub fn from_pairs(pairs: &[(f64, ImpactValue)]) -> Result<Self, SessionError> {
        Self::new(pairs.iter().map(|&(t, value)| Event { t, value }).collect())
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn ordinal_events(&self) -> impl Iterator<Item = &Event> {
        self.events.iter().filter(|e| e.value.is_ordinal())
    }

    pub fn markers(&self) -> impl Iterator<Item = &Event> {
        self.events.iter().filter(|e| !e.value.is_ordinal())
    }
}

/// Mono PCM audio, samples scaled to `[-1, 1)`.
#[derive(Clone, PartialEq)]
pub struct AudioTrack {
    pub samples: Vec<f32>,
    pub sample_rate: u32,
}

impl fmt::Debug for AudioTrack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AudioTrack")
            .field("samples", &self.samples.len())
            .field("sample_rate", &self.sample_rate)
            .finish()
    }
}

impl AudioTrack {
    pub fn new(samples: Vec<f32>, sample_rate: u32) -> Result<Self, SessionError> {
        check_audio_rate(sample_rate, "")?;
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    /// Builds a track without the recording-rate check. For analysis of
    /// already-resampled or synthetic material.
    pub fn unchecked(samples: Vec<f32>, sample_rate: u32) -> Self {
        Self {
            samples,
            sample_rate,
        }
    }

    pub fn from_f64(samples: &[f64], sample_rate: u32) -> Self {
        Self::unchecked(samples.iter().map(|&s| s as f32).collect(), sample_rate)
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.samples.iter().map(|&s| s as f64).collect()
    }
}

pub(crate) fn check_audio_rate(rate: u32, file: &str) -> Result<(), SessionError> {
    if (MIN_AUDIO_RATE_HZ..=MAX_AUDIO_RATE_HZ).contains(&rate) {
        Ok(())
    } else {
        Err(SessionError::RateOutOfRange {
            file: file.to_string(),
            rate,
        })
    }
}

/// Post-conversation questionnaire answers, each on a 1-10 scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyResponses {
    pub survey_i_item1: f64,
    pub survey_i_item2: f64,
    pub survey_p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub self_estimate: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StreamKind {
    ParticipantAudio,
    InhabiterAudio,
    Emotions,
    Impact,
    Eoi,
    #[serde(rename = "self")]
    SelfAssessment,
    Survey,
}

impl StreamKind {
    pub const ALL: [StreamKind; 7] = [
        Self::ParticipantAudio,
        Self::InhabiterAudio,
        Self::Emotions,
        Self::Impact,
        Self::Eoi,
        Self::SelfAssessment,
        Self::Survey,
    ];

    pub fn is_required(self) -> bool {
        matches!(self, Self::ParticipantAudio | Self::Impact | Self::Survey)
    }

    pub fn manifest_key(self) -> &'static str {
        match self {
            Self::ParticipantAudio => "participant_audio",
            Self::InhabiterAudio => "inhabiter_audio",
            Self::Emotions => "emotions",
            Self::Impact => "impact",
            Self::Eoi => "eoi",
            Self::SelfAssessment => "self",
            Self::Survey => "survey",
        }
    }

    pub fn default_file_name(self) -> &'static str {
        match self {
            Self::ParticipantAudio => "participant.wav",
            Self::InhabiterAudio => "inhabiter.wav",
            Self::Emotions => "emotions.csv",
            Self::Impact => "impact.jsonl",
            Self::Eoi => "eoi.jsonl",
            Self::SelfAssessment => "self.jsonl",
            Self::Survey => "survey.json",
        }
    }
}

impl fmt::Display for StreamKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.manifest_key())
    }
}

/// One participant-avatar conversation. Streams are `None` when the manifest
/// does not declare them or the declared file does not exist (the latter is
/// also listed in `missing_files`).
#[derive(Debug, Clone, PartialEq)]
pub struct Session {
    pub session_id: String,
    pub participant_id: String,
    pub scenario_id: u8,
    pub duration: f64,
    pub participant_audio: Option<AudioTrack>,
    pub inhabiter_audio: Option<AudioTrack>,
    pub emotion_frames: Option<Vec<EmotionFrame>>,
    pub emotion_fps: Option<f64>,
    pub impact_events: Option<EventStream>,
    pub eoi_events: Option<EventStream>,
    pub self_events: Option<EventStream>,
    pub survey: Option<SurveyResponses>,
    pub missing_files: Vec<(StreamKind, String)>,
}

impl Session {
    /// A session with identity fields set and no streams.
    pub fn empty(session_id: &str, participant_id: &str, scenario_id: u8, duration: f64) -> Self {
        Self {
            session_id: session_id.to_string(),
            participant_id: participant_id.to_string(),
            scenario_id,
            duration,
            participant_audio: None,
            inhabiter_audio: None,
            emotion_frames: None,
            emotion_fps: None,
            impact_events: None,
            eoi_events: None,
            self_events: None,
            survey: None,
            missing_files: Vec::new(),
        }
    }

    pub fn has_stream(&self, kind: StreamKind) -> bool {
        match kind {
            StreamKind::ParticipantAudio => self.participant_audio.is_some(),
            StreamKind::InhabiterAudio => self.inhabiter_audio.is_some(),
            StreamKind::Emotions => self.emotion_frames.is_some(),
            StreamKind::Impact => self.impact_events.is_some(),
            StreamKind::Eoi => self.eoi_events.is_some(),
            StreamKind::SelfAssessment => self.self_events.is_some(),
            StreamKind::Survey => self.survey.is_some(),
        }
    }
}

/// Zero-order-hold samples of an ordinal stream on a regular frame grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSeries {
    pub rate: f64,
    pub t0: f64,
    /// Covered time span. The last frame may be partial.
    pub duration: f64,
    pub values: Vec<i8>,
}

impl SampledSeries {
    /// A series whose duration is exactly `values.len() / rate`.
    pub fn new(rate: f64, values: Vec<i8>) -> Self {
        let duration = values.len() as f64 / rate;
        Self {
            rate,
            t0: 0.0,
            duration,
            values,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Time weight of frame `k` in seconds; the final frame is clipped to
    /// `duration`.
    pub fn frame_weight(&self, k: usize) -> f64 {
        let step = 1.0 / self.rate;
        if k + 1 == self.values.len() {
            (self.duration - k as f64 * step).clamp(0.0, step)
        } else {
            step
        }
    }

    /// Inverse of resampling: one event at each frame start where the held
    /// value changes (and at frame 0 when it starts non-neutral).
    pub fn to_event_stream(&self) -> EventStream {
        let mut events = Vec::new();
        let mut prev = 0i8;
        for (k, &v) in self.values.iter().enumerate() {
            if v != prev {
                events.push(Event {
                    t: self.t0 + k as f64 / self.rate,
                    value: ImpactValue::from_valence(v).expect("ordinal sample"),
                });
            }
            prev = v;
        }
        EventStream { events }
    }

    pub fn transitions(&self) -> usize {
        self.values.windows(2).filter(|w| w[0] != w[1]).count()
    }
}
