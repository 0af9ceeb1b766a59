//! Analysis configuration. Precedence is flags > config file > defaults; the
//! resolved configuration is echoed into every output.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parsing {path}: {message}")]
    Parse { path: String, message: String },
    #[error("invalid value: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VadConfig {
    /// Activity threshold relative to the loudest 10 ms frame, dB.
    pub threshold_db: f64,
    /// Absolute floor below which a frame is never active, dBFS.
    pub floor_dbfs: f64,
    /// Inactive runs shorter than this between active frames are bridged.
    pub hangover_ms: f64,
    pub frame_ms: f64,
    /// Frames with a zero-crossing rate above this need `zcr_margin_db` more
    /// energy to count as active.
    pub zcr_max: f64,
    pub zcr_margin_db: f64,
    /// Active runs shorter than this are discarded.
    pub min_segment_ms: f64,
}

impl Default for VadConfig {
    fn default() -> Self {
        Self {
            threshold_db: -35.0,
            floor_dbfs: -70.0,
            hangover_ms: 100.0,
            frame_ms: 10.0,
            zcr_max: 0.35,
            zcr_margin_db: 10.0,
            min_segment_ms: 30.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PitchConfig {
    pub floor_hz: f64,
    pub ceiling_hz: f64,
    /// Analysis window and hop, seconds.
    pub window_s: f64,
    /// Minimum normalized autocorrelation for a window to count as voiced.
    pub voicing_threshold: f64,
    /// Fraction of a window that must be voice-active to be analyzed.
    pub min_active_fraction: f64,
}

impl Default for PitchConfig {
    fn default() -> Self {
        Self {
            floor_hz: 60.0,
            ceiling_hz: 500.0,
            window_s: 0.5,
            voicing_threshold: 0.45,
            min_active_fraction: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PauseConfig {
    /// Shortest silence counted as a pause (and removed by preprocessing).
    pub min_s: f64,
}

impl Default for PauseConfig {
    fn default() -> Self {
        Self { min_s: 0.3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyllableConfig {
    /// Required rise of an intensity peak over the preceding dip, dB.
    pub dip_db: f64,
}

impl Default for SyllableConfig {
    fn default() -> Self {
        Self { dip_db: 2.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HighpassConfig {
    pub cutoff_hz: f64,
}

impl Default for HighpassConfig {
    fn default() -> Self {
        Self { cutoff_hz: 60.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FormantConfig {
    /// Analysis band: audio is resampled to twice this before LPC.
    pub max_hz: f64,
    pub min_hz: f64,
    /// Poles wider than this are not formants.
    pub max_bandwidth_hz: f64,
}

impl Default for FormantConfig {
    fn default() -> Self {
        Self {
            max_hz: 5500.0,
            min_hz: 90.0,
            max_bandwidth_hz: 700.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvmConfig {
    pub c: f64,
    /// KKT violation tolerance of the dual solver.
    pub tolerance: f64,
    pub max_iter: usize,
    pub top_k: usize,
    pub corr_max: f64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        Self {
            c: 1.0,
            tolerance: 1e-6,
            max_iter: 10_000_000,
            top_k: 20,
            corr_max: 0.9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmotionConfig {
    pub k_sigma: f64,
    /// Optional `name,x,y` CSV replacing the built-in coordinates.
    pub map_csv: Option<String>,
    /// Optional cluster JSON replacing the built-in clusters.
    pub clusters_json: Option<String>,
}

impl Default for EmotionConfig {
    fn default() -> Self {
        Self {
            k_sigma: crate::emotion_space::DEFAULT_K_SIGMA,
            map_csv: None,
            clusters_json: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlignConfig {
    pub rate_hz: f64,
}

impl Default for AlignConfig {
    fn default() -> Self {
        Self {
            rate_hz: crate::session_store::DEFAULT_RATE_HZ,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub vad: VadConfig,
    pub pitch: PitchConfig,
    pub pause: PauseConfig,
    pub syllable: SyllableConfig,
    pub highpass: HighpassConfig,
    pub formant: FormantConfig,
    pub svm: SvmConfig,
    pub emotion: EmotionConfig,
    pub align: AlignConfig,
}

impl AnalysisConfig {
    /// Reads a TOML file; missing keys take their defaults.
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let cfg: Self = toml::from_str(&text).map_err(|e| ConfigError::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = [
            ("vad.frame_ms", self.vad.frame_ms),
            ("pitch.floor_hz", self.pitch.floor_hz),
            ("pitch.window_s", self.pitch.window_s),
            ("highpass.cutoff_hz", self.highpass.cutoff_hz),
            ("formant.max_hz", self.formant.max_hz),
            ("svm.c", self.svm.c),
            ("svm.tolerance", self.svm.tolerance),
            ("emotion.k_sigma", self.emotion.k_sigma),
            ("align.rate_hz", self.align.rate_hz),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ConfigError::Invalid(format!("{name} = {v} must be positive")));
            }
        }
        if self.pitch.ceiling_hz <= self.pitch.floor_hz {
            return Err(ConfigError::Invalid("pitch.ceiling_hz must exceed pitch.floor_hz".into()));
        }
        if self.pause.min_s < 0.0 || self.vad.hangover_ms < 0.0 || self.syllable.dip_db < 0.0 {
            return Err(ConfigError::Invalid("pause, hangover and dip settings must be non-negative".into()));
        }
        if !(0.0..=1.0).contains(&self.svm.corr_max) || self.svm.top_k == 0 {
            return Err(ConfigError::Invalid("svm.corr_max must be in [0, 1] and svm.top_k >= 1".into()));
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
