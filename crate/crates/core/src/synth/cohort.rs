//! Whole synthetic cohorts: four scenarios per participant, with success
//! labels laid out to match known transition counts and a tunable success
//! signal planted in the participant's voice.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::emotion_space::{EmotionFrame, EmotionMap, NUM_EMOTIONS};
use crate::session_store::{AudioTrack, Event, EventStream, ImpactValue, Session, SurveyResponses};

use super::audio::{speech, VoiceParams};

#[derive(Debug, Clone, PartialEq)]
pub struct CohortParams {
    pub n_participants: usize,
    /// Participants successful at Scenario 1.
    pub s1_successful: usize,
    /// Scenario-1 successes who fail at Scenario 4.
    pub cross_down: usize,
    /// Scenario-1 failures who succeed at Scenario 4.
    pub cross_up: usize,
    /// Successes in Scenarios 2 and 3.
    pub s2_successful: usize,
    pub s3_successful: usize,
    /// 0 leaves the voice independent of the label; 1 is a strong effect.
    pub signal: f64,
    pub duration_s: f64,
    pub sample_rate: u32,
    pub emotion_fps: f64,
}

impl Default for CohortParams {
    /// 51 participants, 130 of 204 sessions successful, Scenario-1 by
    /// Scenario-4 table [[20, 3], [12, 16]].
    fn default() -> Self {
        Self {
            n_participants: 51,
            s1_successful: 23,
            cross_down: 3,
            cross_up: 12,
            s2_successful: 37,
            s3_successful: 38,
            signal: 1.0,
            duration_s: 4.0,
            sample_rate: 16_000,
            emotion_fps: 5.0,
        }
    }
}

impl CohortParams {
    pub fn n_sessions(&self) -> usize {
        4 * self.n_participants
    }

    /// `labels[p][scenario - 1]`.
    pub fn labels(&self, rng: &mut ChaCha8Rng) -> Vec<[bool; 4]> {
        let n = self.n_participants;
        let s1 = self.s1_successful;
        assert!(s1 <= n && self.cross_down <= s1 && self.cross_up <= n - s1);
        assert!(self.s2_successful <= n && self.s3_successful <= n);
        let s2 = super::corpus::balanced_labels(n, self.s2_successful, rng);
        let s3 = super::corpus::balanced_labels(n, self.s3_successful, rng);
        (0..n)
            .map(|p| {
                let first = p < s1;
                let last = if first { p < s1 - self.cross_down } else { p < s1 + self.cross_up };
                [first, s2[p], s3[p], last]
            })
            .collect()
    }
}

pub fn session_id(participant: usize, scenario: u8) -> String {
    format!("p{participant:03}-s{scenario}")
}

fn score(rng: &mut ChaCha8Rng, success: bool) -> f64 {
    if success {
        rng.random_range(7..=10) as f64
    } else {
        rng.random_range(2..=6) as f64
    }
}

/// Ordinal IMPACT events: a state change every 0.2-0.8 s, leaning positive
/// for successful sessions.
fn impact_events(rng: &mut ChaCha8Rng, success: bool, duration: f64) -> EventStream {
    let lean = if success { 0.6 } else { 0.2 };
    let mut events = Vec::new();
    let mut t = 0.0;
    let mut prev = None;
    while t < duration {
        let u: f64 = rng.random();
        let value = if u < lean {
            ImpactValue::Positive
        } else if u < 0.8 {
            ImpactValue::Neutral
        } else {
            ImpactValue::Negative
        };
        if prev != Some(value) {
            events.push(Event { t, value });
            prev = Some(value);
        }
        t += rng.random_range(0.2..0.8);
    }
    EventStream::new(events).expect("increasing times")
}

fn eoi_events(rng: &mut ChaCha8Rng, success: bool, duration: f64) -> EventStream {
    let t = rng.random_range(0.1..duration - 0.1);
    let value = if success { ImpactValue::EoiPositive } else { ImpactValue::EoiNegative };
    EventStream::new(vec![Event { t, value }]).expect("single event")
}

/// Frames with random confidences, tilted towards positive-valence emotions
/// for successful sessions.
fn emotion_frames(rng: &mut ChaCha8Rng, success: bool, duration: f64, fps: f64) -> Vec<EmotionFrame> {
    let map = EmotionMap::canonical();
    let tilt = if success { 0.15 } else { -0.15 };
    let n = (duration * fps).floor() as usize;
    (0..n)
        .map(|k| {
            let mut f = EmotionFrame::zeros(k as f64 / fps);
            for i in 0..NUM_EMOTIONS {
                let valence = map.coordinates(i)[0];
                let base: f64 = rng.random_range(0.0..0.3);
                f.p[i] = (base + tilt * valence).clamp(0.0, 1.0);
            }
            f
        })
        .collect()
}

/// Speaker identity varies freely; the label moves pitch, tempo, pausing and
/// voice quality in proportion to `signal`.
pub fn voice_for(rng: &mut ChaCha8Rng, success: bool, signal: f64) -> VoiceParams {
    let s = if success { signal } else { -signal };
    VoiceParams {
        f0_hz: rng.random_range(110.0..170.0) * (1.0 + 0.15 * s),
        jitter: (0.008 - 0.005 * s) * rng.random_range(0.8..1.2),
        shimmer: (0.05 - 0.03 * s) * rng.random_range(0.8..1.2),
        formant_scale: rng.random_range(0.9..1.1),
        syllable_rate: rng.random_range(3.5..4.5) * (1.0 + 0.2 * s),
        syllables_per_phrase: rng.random_range(4..=7),
        pause_s: rng.random_range(0.4..0.6) * (1.0 - 0.3 * s),
        amp: rng.random_range(0.3..0.8),
        noise: rng.random_range(0.01..0.03) * (1.0 - 0.5 * s),
    }
}

/// Builds every session of the cohort. Deterministic in `seed`.
pub fn cohort(p: &CohortParams, seed: u64) -> Vec<Session> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels = p.labels(&mut rng);
    let mut out = Vec::with_capacity(p.n_sessions());
    for (pid, row) in labels.iter().enumerate() {
        for (k, &success) in row.iter().enumerate() {
            let scenario = k as u8 + 1;
            let mut s = Session::empty(&session_id(pid, scenario), &format!("p{pid:03}"), scenario, p.duration_s);
            let item1 = score(&mut rng, success);
            let item2 = if success {
                (item1 + rng.random_range(-1.0..=1.0f64).round()).clamp(7.0, 10.0)
            } else {
                (item1 + rng.random_range(-1.0..=1.0f64).round()).clamp(1.0, 6.0)
            };
            let survey_i = (item1 + item2) / 2.0;
            let survey_p = (survey_i + rng.random_range(-2..=2) as f64).clamp(1.0, 10.0);
            let self_estimate = (survey_i.round() + rng.random_range(-3..=3) as f64).clamp(1.0, 10.0);
            s.survey = Some(SurveyResponses {
                survey_i_item1: item1,
                survey_i_item2: item2,
                survey_p,
                self_estimate: Some(self_estimate),
            });
            s.impact_events = Some(impact_events(&mut rng, success, p.duration_s));
            s.eoi_events = Some(eoi_events(&mut rng, success, p.duration_s));
            s.emotion_frames = Some(emotion_frames(&mut rng, success, p.duration_s, p.emotion_fps));
            s.emotion_fps = Some(p.emotion_fps);
            let voice = voice_for(&mut rng, success, p.signal);
            let audio = speech(&voice, p.duration_s, p.sample_rate, rng.random());
            s.participant_audio = Some(AudioTrack::from_f64(&audio, p.sample_rate));
            out.push(s);
        }
    }
    out
}
