//! On-disk session bundles: `manifest.json` plus one file per stream.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::emotion_space::{emotion_index, emotion_names, EmotionFrame, NUM_EMOTIONS};

use super::model::{check_audio_rate, AudioTrack, Event, EventStream, ImpactValue, Session, StreamKind, SurveyResponses};
use super::SessionError;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ManifestFiles {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub participant_audio: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inhabiter_audio: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emotions: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub impact: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eoi: Option<String>,
    #[serde(default, rename = "self", skip_serializing_if = "Option::is_none")]
    pub self_assessment: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub survey: Option<String>,
}

impl ManifestFiles {
    pub fn get(&self, kind: StreamKind) -> Option<&str> {
        match kind {
            StreamKind::ParticipantAudio => self.participant_audio.as_deref(),
            StreamKind::InhabiterAudio => self.inhabiter_audio.as_deref(),
            StreamKind::Emotions => self.emotions.as_deref(),
            StreamKind::Impact => self.impact.as_deref(),
            StreamKind::Eoi => self.eoi.as_deref(),
            StreamKind::SelfAssessment => self.self_assessment.as_deref(),
            StreamKind::Survey => self.survey.as_deref(),
        }
    }

    pub fn set(&mut self, kind: StreamKind, file: Option<String>) {
        let slot = match kind {
            StreamKind::ParticipantAudio => &mut self.participant_audio,
            StreamKind::InhabiterAudio => &mut self.inhabiter_audio,
            StreamKind::Emotions => &mut self.emotions,
            StreamKind::Impact => &mut self.impact,
            StreamKind::Eoi => &mut self.eoi,
            StreamKind::SelfAssessment => &mut self.self_assessment,
            StreamKind::Survey => &mut self.survey,
        };
        *slot = file;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SampleRates {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub participant_audio_hz: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emotion_fps: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub session_id: String,
    pub participant_id: String,
    pub scenario_id: i64,
    pub duration_s: f64,
    pub files: ManifestFiles,
    #[serde(default)]
    pub sample_rates: SampleRates,
}

impl Manifest {
    pub fn read(dir: &Path) -> Result<Self, SessionError> {
        let path = dir.join(MANIFEST_FILE);
        if !path.is_file() {
            return Err(SessionError::MissingManifest(dir.to_path_buf()));
        }
        let text = fs::read_to_string(&path).map_err(|e| SessionError::io(&path, e))?;
        serde_json::from_str(&text).map_err(|e| SessionError::MalformedStream {
            file: MANIFEST_FILE.into(),
            line: e.line(),
            message: e.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

/// Reads and parses a session bundle directory.
pub fn ingest_bundle(dir: impl AsRef<Path>) -> Result<Session, SessionError> {
    let dir = dir.as_ref();
    let manifest = Manifest::read(dir)?;
    if !(1..=4).contains(&manifest.scenario_id) {
        return Err(SessionError::InvalidManifest(format!(
            "scenario_id {} not in 1..=4",
            manifest.scenario_id
        )));
    }
    if !(manifest.duration_s > 0.0 && manifest.duration_s.is_finite()) {
        return Err(SessionError::InvalidManifest(format!(
            "duration_s {} must be positive",
            manifest.duration_s
        )));
    }
    if let Some(rate) = manifest.sample_rates.participant_audio_hz {
        check_audio_rate(rate, MANIFEST_FILE)?;
    }

    let mut session = Session::empty(
        &manifest.session_id,
        &manifest.participant_id,
        manifest.scenario_id as u8,
        manifest.duration_s,
    );
    session.emotion_fps = manifest.sample_rates.emotion_fps;
    let duration = manifest.duration_s;

    for kind in StreamKind::ALL {
        let Some(name) = manifest.files.get(kind) else {
            continue;
        };
        let path = dir.join(name);
        if !path.is_file() {
            session.missing_files.push((kind, name.to_string()));
            continue;
        }
        match kind {
            StreamKind::ParticipantAudio => {
                let track = read_wav(&path, name)?;
                if let Some(rate) = manifest.sample_rates.participant_audio_hz {
                    if rate != track.sample_rate {
                        return Err(SessionError::MalformedStream {
                            file: name.into(),
                            line: 0,
                            message: format!(
                                "header rate {} Hz differs from manifest {} Hz",
                                track.sample_rate, rate
                            ),
                        });
                    }
                }
                session.participant_audio = Some(track);
            }
            StreamKind::InhabiterAudio => session.inhabiter_audio = Some(read_wav(&path, name)?),
            StreamKind::Emotions => {
                let text = read_text(&path)?;
                session.emotion_frames = Some(parse_emotions_csv(&text, name, duration)?);
            }
            StreamKind::Impact | StreamKind::Eoi | StreamKind::SelfAssessment => {
                let text = read_text(&path)?;
                let stream = parse_event_jsonl(&text, kind, name)?;
                check_event_range(&stream, duration, name)?;
                match kind {
                    StreamKind::Impact => session.impact_events = Some(stream),
                    StreamKind::Eoi => session.eoi_events = Some(stream),
                    _ => session.self_events = Some(stream),
                }
            }
            StreamKind::Survey => {
                let text = read_text(&path)?;
                let survey: SurveyResponses =
                    serde_json::from_str(&text).map_err(|e| SessionError::MalformedStream {
                        file: name.into(),
                        line: e.line(),
                        message: e.to_string(),
                    })?;
                session.survey = Some(survey);
            }
        }
    }
    Ok(session)
}

fn read_text(path: &Path) -> Result<String, SessionError> {
    fs::read_to_string(path).map_err(|e| SessionError::io(path, e))
}

fn check_event_range(stream: &EventStream, duration: f64, file: &str) -> Result<(), SessionError> {
    for (i, e) in stream.events().iter().enumerate() {
        if e.t < 0.0 || e.t > duration {
            return Err(SessionError::TimestampOutOfRange {
                file: file.into(),
                line: i + 1,
                t: e.t,
            });
        }
    }
    Ok(())
}

/// Reads a 16-bit PCM mono WAV file.
pub fn read_wav(path: &Path, name: &str) -> Result<AudioTrack, SessionError> {
    let malformed = |message: String| SessionError::MalformedStream {
        file: name.into(),
        line: 0,
        message,
    };
    let reader = hound::WavReader::open(path).map_err(|e| malformed(e.to_string()))?;
    let spec = reader.spec();
    if spec.channels != 1 {
        return Err(malformed(format!("{} channels, expected mono", spec.channels)));
    }
    if spec.sample_format != hound::SampleFormat::Int || spec.bits_per_sample != 16 {
        return Err(malformed(format!(
            "{:?} {}-bit samples, expected 16-bit PCM",
            spec.sample_format, spec.bits_per_sample
        )));
    }
    check_audio_rate(spec.sample_rate, name)?;
    let samples = reader
        .into_samples::<i16>()
        .map(|s| s.map(|v| v as f32 / 32768.0))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| malformed(e.to_string()))?;
    Ok(AudioTrack::unchecked(samples, spec.sample_rate))
}

pub fn write_wav(path: &Path, track: &AudioTrack) -> Result<(), SessionError> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: track.sample_rate,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let io_err = |e: hound::Error| SessionError::io(path, io::Error::other(e.to_string()));
    let mut w = hound::WavWriter::create(path, spec).map_err(io_err)?;
    for &s in &track.samples {
        let v = (s as f64 * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        w.write_sample(v).map_err(io_err)?;
    }
    w.finalize().map_err(io_err)
}

#[derive(Deserialize)]
struct RawEvent {
    t: f64,
    v: serde_json::Value,
}

/// Parses an event stream in JSONL form. `kind` selects the value domain:
/// rating labels for impact/self streams, codes 4 and 5 for events of interest.
pub fn parse_event_jsonl(text: &str, kind: StreamKind, file: &str) -> Result<EventStream, SessionError> {
    let mut events: Vec<Event> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let malformed = |message: String| SessionError::MalformedStream {
            file: file.into(),
            line: line_no,
            message,
        };
        let raw: RawEvent = serde_json::from_str(line).map_err(|e| malformed(e.to_string()))?;
        if !raw.t.is_finite() {
            return Err(malformed("non-finite timestamp".into()));
        }
        let value = match kind {
            StreamKind::Eoi => raw
                .v
                .as_u64()
                .and_then(|c| u8::try_from(c).ok())
                .and_then(ImpactValue::from_eoi_code)
                .ok_or_else(|| malformed(format!("expected 4 or 5, found {}", raw.v)))?,
            StreamKind::Impact | StreamKind::SelfAssessment => raw
                .v
                .as_str()
                .and_then(ImpactValue::from_wire_label)
                .ok_or_else(|| {
                    malformed(format!("expected positive|neutral|negative, found {}", raw.v))
                })?,
            other => return Err(malformed(format!("{other} is not an event stream"))),
        };
        if let Some(prev) = events.last() {
            if raw.t <= prev.t {
                return Err(SessionError::NonMonotonicTimestamps {
                    file: file.into(),
                    line: line_no,
                });
            }
        }
        events.push(Event { t: raw.t, value });
    }
    EventStream::new(events)
}

pub fn event_jsonl(stream: &EventStream) -> String {
    let mut out = String::new();
    for e in stream.events() {
        let v = match (e.value.wire_label(), e.value.eoi_code()) {
            (Some(label), _) => serde_json::Value::from(label),
            (None, Some(code)) => serde_json::Value::from(code),
            (None, None) => unreachable!("every value has a wire form"),
        };
        out.push_str(&serde_json::json!({ "t": e.t, "v": v }).to_string());
        out.push('\n');
    }
    out
}

/// Parses `frame,t_s,<48 emotion names>`; columns may come in any order.
pub fn parse_emotions_csv(text: &str, file: &str, duration: f64) -> Result<Vec<EmotionFrame>, SessionError> {
    let malformed = |line: usize, message: String| SessionError::MalformedStream {
        file: file.into(),
        line,
        message,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| malformed(1, e.to_string()))?.clone();
    if headers.len() != NUM_EMOTIONS + 2 || &headers[0] != "frame" || &headers[1] != "t_s" {
        return Err(malformed(
            1,
            format!("expected frame,t_s and {NUM_EMOTIONS} emotion columns"),
        ));
    }
    let mut column_to_emotion = Vec::with_capacity(NUM_EMOTIONS);
    let mut seen = [false; NUM_EMOTIONS];
    for name in headers.iter().skip(2) {
        let idx = emotion_index(name).ok_or_else(|| malformed(1, format!("unknown emotion `{name}`")))?;
        if std::mem::replace(&mut seen[idx], true) {
            return Err(malformed(1, format!("duplicate emotion `{name}`")));
        }
        column_to_emotion.push(idx);
    }

    let mut frames: Vec<EmotionFrame> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            malformed(line, e.to_string())
        })?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| malformed(line, format!("`{s}`: {e}")))
        };
        let t = num(&rec[1])?;
        if !t.is_finite() {
            return Err(malformed(line, "non-finite timestamp".into()));
        }
        if t < 0.0 || t > duration {
            return Err(SessionError::TimestampOutOfRange {
                file: file.into(),
                line,
                t,
            });
        }
        if frames.last().is_some_and(|f| t <= f.t) {
            return Err(SessionError::NonMonotonicTimestamps {
                file: file.into(),
                line,
            });
        }
        let mut frame = EmotionFrame::zeros(t);
        for (col, &idx) in column_to_emotion.iter().enumerate() {
            let p = num(&rec[col + 2])?;
            if !(0.0..=1.0).contains(&p) {
                return Err(malformed(line, format!("probability {p} outside [0, 1]")));
            }
            frame.p[idx] = p;
        }
        frames.push(frame);
    }
    Ok(frames)
}

pub fn emotions_csv(frames: &[EmotionFrame]) -> String {
    let mut out = String::from("frame,t_s");
    for name in emotion_names() {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (i, f) in frames.iter().enumerate() {
        out.push_str(&format!("{i},{}", f.t));
        for p in &f.p {
            out.push_str(&format!(",{p}"));
        }
        out.push('\n');
    }
    out
}

/// Writes `contents` to a sibling temp file and renames it over `path`.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), SessionError> {
    let file_name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = path.with_file_name(format!(".{file_name}.tmp"));
    let write = || -> io::Result<()> {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    };
    write().map_err(|e| {
        let _ = fs::remove_file(&tmp);
        SessionError::io(path, e)
    })
}

/// Serializes a session into `dir` using the default file names. Streams that
/// are absent in the session are omitted from the manifest.
pub fn write_bundle(session: &Session, dir: impl AsRef<Path>) -> Result<PathBuf, SessionError> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| SessionError::io(dir, e))?;
    let mut files = ManifestFiles::default();
    let mut put = |kind: StreamKind, bytes: Option<Vec<u8>>| -> Result<(), SessionError> {
        if let Some(bytes) = bytes {
            let name = kind.default_file_name();
            write_atomic(&dir.join(name), &bytes)?;
            files.set(kind, Some(name.to_string()));
        }
        Ok(())
    };
    put(StreamKind::Emotions, session.emotion_frames.as_deref().map(|f| emotions_csv(f).into_bytes()))?;
    put(StreamKind::Impact, session.impact_events.as_ref().map(|s| event_jsonl(s).into_bytes()))?;
    put(StreamKind::Eoi, session.eoi_events.as_ref().map(|s| event_jsonl(s).into_bytes()))?;
    put(StreamKind::SelfAssessment, session.self_events.as_ref().map(|s| event_jsonl(s).into_bytes()))?;
    put(
        StreamKind::Survey,
        session
            .survey
            .as_ref()
            .map(|s| format!("{}\n", serde_json::to_string_pretty(s).expect("survey serializes")).into_bytes()),
    )?;
    for (kind, track) in [
        (StreamKind::ParticipantAudio, &session.participant_audio),
        (StreamKind::InhabiterAudio, &session.inhabiter_audio),
    ] {
        if let Some(track) = track {
            let name = kind.default_file_name();
            write_wav(&dir.join(name), track)?;
            files.set(kind, Some(name.to_string()));
        }
    }
    let manifest = Manifest {
        session_id: session.session_id.clone(),
        participant_id: session.participant_id.clone(),
        scenario_id: session.scenario_id as i64,
        duration_s: session.duration,
        files,
        sample_rates: SampleRates {
            participant_audio_hz: session.participant_audio.as_ref().map(|a| a.sample_rate),
            emotion_fps: session.emotion_fps,
        },
    };
    write_atomic(&dir.join(MANIFEST_FILE), manifest.to_json().as_bytes())?;
    Ok(dir.to_path_buf())
}

/// Replaces the self-assessment stream of an existing bundle. The new stream
/// is validated first; on any error the bundle is left untouched.
pub fn merge_self_assessment(dir: impl AsRef<Path>, jsonl: &str) -> Result<EventStream, SessionError> {
    let dir = dir.as_ref();
    let mut manifest = Manifest::read(dir)?;
    let name = StreamKind::SelfAssessment.default_file_name();
    let stream = parse_event_jsonl(jsonl, StreamKind::SelfAssessment, name)?;
    check_event_range(&stream, manifest.duration_s, name)?;
    // Re-serialize so the stored file is canonical.
    write_atomic(&dir.join(name), event_jsonl(&stream).as_bytes())?;
    if manifest.files.self_assessment.as_deref() != Some(name) {
        manifest.files.self_assessment = Some(name.to_string());
        write_atomic(&dir.join(MANIFEST_FILE), manifest.to_json().as_bytes())?;
    }
    Ok(stream)
}
