//! Session bundles: data model, ingestion, validation and alignment of all
//! event streams onto a common frame grid.

mod bundle;
mod model;
mod resample;
mod validate;

use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub use bundle::{
    emotions_csv, event_jsonl, ingest_bundle, merge_self_assessment, parse_emotions_csv, parse_event_jsonl,
    read_wav, write_atomic, write_bundle, write_wav, Manifest, ManifestFiles, SampleRates, MANIFEST_FILE,
};
pub use model::{
    AudioTrack, Event, EventStream, ImpactValue, SampledSeries, Session, StreamKind, SurveyResponses,
    MAX_AUDIO_RATE_HZ, MIN_AUDIO_RATE_HZ,
};
pub use resample::{
    align_emotion_frames, align_streams, frame_count, resample_events, AlignedSession, EmotionAlignment,
    DEFAULT_RATE_HZ,
};
pub use validate::{validate_session, Issue, Severity, ValidationReport, DURATION_TOLERANCE_S};

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("no manifest.json in {0}")]
    MissingManifest(PathBuf),
    #[error("{file}:{line}: {message}")]
    MalformedStream { file: String, line: usize, message: String },
    #[error("{file}: sample rate {rate} Hz outside 16000..=48000")]
    RateOutOfRange { file: String, rate: u32 },
    #[error("{file}:{line}: timestamps must be strictly increasing")]
    NonMonotonicTimestamps { file: String, line: usize },
    #[error("{file}:{line}: timestamp {t} outside the session")]
    TimestampOutOfRange { file: String, line: usize, t: f64 },
    #[error("invalid manifest: {0}")]
    InvalidManifest(String),
    #[error("invalid event: {0}")]
    InvalidEvent(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("session {0} is not usable")]
    UnusableSession(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl SessionError {
    pub(crate) fn io(path: &Path, source: io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}
