//! Participant-audio feature extraction: voice activity, preprocessing,
//! pitch, perturbation, harmonicity, formants and speech timing, assembled
//! into the registry-ordered 53-entry vector.

pub mod derived;
pub mod filter;
pub mod formants;
pub mod hnr;
pub mod perturbation;
pub mod pitch;
pub mod registry;
pub mod speech;
pub mod vad;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::AnalysisConfig;
use crate::session_store::AudioTrack;

pub use derived::{derived_formant_features, DerivedFormants};
pub use filter::{highpass, preprocess, resample};
pub use formants::{formants, FormantTrack, Resonance};
pub use hnr::{hnr, HnrStats};
pub use perturbation::{jitter, shimmer, Perturbation};
pub use pitch::{f0_track, PitchFrame, PitchTrack};
pub use registry::{feature_index, feature_names, FeatureSpec, FEATURES, REGISTRY_VERSION};
pub use speech::{speech_stats, SpeechStats};
pub use vad::{vad, VadSegments};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AudioError {
    #[error("empty audio")]
    EmptyAudio,
    #[error("need at least {needed} periods, got {got}")]
    TooFewPeriods { needed: usize, got: usize },
    #[error("no voiced content")]
    NoVoicedContent,
    #[error("missing formant: {0}")]
    MissingFormant(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Registry-ordered feature values. `None` marks a feature that could not
/// be computed; an unusable vector is all `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: Vec<Option<f64>>,
    pub usable: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl FeatureVector {
    pub fn unusable(err: &AudioError) -> Self {
        Self {
            values: vec![None; FEATURES.len()],
            usable: false,
            reason: Some(err.to_string()),
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        feature_index(name).and_then(|i| self.values[i])
    }

    pub fn absent_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }

    pub fn is_complete(&self) -> bool {
        self.usable && self.absent_count() == 0
    }
}

fn mean(x: &[f64]) -> Option<f64> {
    (!x.is_empty()).then(|| x.iter().sum::<f64>() / x.len() as f64)
}

fn pop_sd(x: &[f64]) -> Option<f64> {
    let m = mean(x)?;
    Some((x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / x.len() as f64).sqrt())
}

/// Linear-interpolation quantile of unsorted data.
fn quantile(x: &[f64], q: f64) -> Option<f64> {
    if x.is_empty() {
        return None;
    }
    let mut s = x.to_vec();
    s.sort_by(f64::total_cmp);
    let pos = q * (s.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    Some(s[lo] + (s[hi] - s[lo]) * (pos - lo as f64))
}

fn min(x: &[f64]) -> Option<f64> {
    x.iter().copied().reduce(f64::min)
}

fn max(x: &[f64]) -> Option<f64> {
    x.iter().copied().reduce(f64::max)
}

/// Full extraction. Pauses are counted on the filtered recording; all other
/// measures run on the track after silence removal.
pub fn extract_features(track: &AudioTrack, cfg: &AnalysisConfig) -> Result<FeatureVector, AudioError> {
    if track.samples.is_empty() {
        return Err(AudioError::EmptyAudio);
    }
    let fs = track.sample_rate as f64;
    let mut x = track.to_f64();
    highpass(&mut x, fs, cfg.highpass.cutoff_hz);
    let filtered = AudioTrack::from_f64(&x, track.sample_rate);
    let original_segments = vad(&filtered, &cfg.vad)?;
    let (pause_count, total_pause) = speech::pauses(&original_segments, cfg.pause.min_s);

    let y = filter::splice(&x, fs, &original_segments, cfg.pause.min_s);
    if y.is_empty() {
        return Err(AudioError::NoVoicedContent);
    }
    let trimmed = AudioTrack::from_f64(&y, track.sample_rate);
    let segments = vad(&trimmed, &cfg.vad)?;
    let pitch = f0_track(&y, fs, &segments, &cfg.pitch);
    let f0 = pitch.f0_values();
    if f0.is_empty() {
        return Err(AudioError::NoVoicedContent);
    }

    let mut v: Vec<Option<f64>> = Vec::with_capacity(FEATURES.len());
    let f0_mean = mean(&f0);
    v.extend([
        f0_mean,
        quantile(&f0, 0.5),
        min(&f0),
        max(&f0),
        pop_sd(&f0),
        quantile(&f0, 0.25),
        quantile(&f0, 0.75),
    ]);

    let p = perturbation::perturbation(&y, fs, &pitch);
    v.extend([
        p.jitter_local,
        p.jitter_local_abs_s,
        p.jitter_rap,
        p.jitter_ppq5,
        p.shimmer_local,
        p.shimmer_local_db,
        p.shimmer_apq3,
        p.shimmer_apq5,
    ]);

    let h = hnr(&pitch).ok();
    v.extend([h.map(|h| h.mean_db), h.map(|h| h.sd_db)]);

    let ft = formants(&y, fs, &pitch, &cfg.formant)?;
    let freqs: Vec<Vec<f64>> = (0..4).map(|i| ft.values(i).iter().map(|r| r.freq_hz).collect()).collect();
    let bws: Vec<Vec<f64>> = (0..4).map(|i| ft.values(i).iter().map(|r| r.bandwidth_hz).collect()).collect();
    let f_means: Vec<Option<f64>> = freqs.iter().map(|f| mean(f)).collect();
    v.extend(f_means.iter().copied());
    v.extend(freqs.iter().map(|f| quantile(f, 0.5)));
    v.extend(freqs.iter().map(|f| pop_sd(f)));
    v.extend(bws.iter().map(|b| mean(b)));

    let contour = speech::intensity_contour(&y, fs);
    let active: Vec<f64> = segments
        .spans()
        .iter()
        .flat_map(|&(s, e)| contour.within(s, e).iter().copied())
        .collect();
    v.extend([mean(&active), pop_sd(&active), min(&active), max(&active)]);

    let analyzed = pitch.frames.iter().filter(|f| f.analyzed).count();
    v.push((analyzed > 0).then(|| f0.len() as f64 / analyzed as f64));

    let frame_len = ((cfg.vad.frame_ms * fs / 1000.0).round() as usize).max(1);
    let stats = vad::frame_stats(&trimmed.samples, frame_len);
    let zcr: Vec<f64> = stats
        .zcr
        .iter()
        .enumerate()
        .filter(|&(k, _)| {
            let t = (k as f64 + 0.5) * frame_len as f64 / fs;
            segments.spans().iter().any(|&(s, e)| t >= s && t < e)
        })
        .map(|(_, &z)| z)
        .collect();
    v.push(mean(&zcr));

    let fm = [f_means[0], f_means[1], f_means[2], f_means[3]];
    match derived_formant_features(fm, f0_mean) {
        Ok(d) => v.extend([
            Some(d.average_hz),
            Some(d.dispersion_hz),
            d.gpr_vtl,
            Some(d.vocal_tract_length_cm),
            Some(d.spacing_hz),
        ]),
        Err(_) => v.extend([None; 5]),
    }

    let mut sp = speech_stats(&y, fs, &segments, cfg);
    sp.pause_count = pause_count;
    sp.total_pause_s = total_pause;
    v.extend([
        Some(sp.speech_duration_s),
        Some(sp.syllable_count as f64),
        Some(sp.phonation_time_s),
        Some(sp.pause_count as f64),
        sp.speech_rate_per_s,
        sp.articulation_rate_per_s,
        sp.phonation_ratio,
        Some(sp.total_pause_s),
        Some(sp.voiced_segment_count as f64),
    ]);

    debug_assert_eq!(v.len(), FEATURES.len());
    let values = v.into_iter().map(|x| x.filter(|x| x.is_finite())).collect();
    Ok(FeatureVector {
        values,
        usable: true,
        reason: None,
    })
}

/// Like [`extract_features`], but failures become an unusable vector.
pub fn audio_feature_vector(track: &AudioTrack, cfg: &AnalysisConfig) -> FeatureVector {
    extract_features(track, cfg).unwrap_or_else(|e| FeatureVector::unusable(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::audio::{silence, vowel_sequence};

    fn speechlike() -> AudioTrack {
        AudioTrack::from_f64(&vowel_sequence(4.0, 16000, 5), 16000)
    }

    #[test]
    fn vowel_sequence_complete() {
        let v = audio_feature_vector(&speechlike(), &AnalysisConfig::default());
        assert!(v.usable);
        let missing: Vec<_> = FEATURES
            .iter()
            .zip(&v.values)
            .filter(|(_, x)| x.is_none())
            .map(|(f, _)| f.name)
            .collect();
        assert!(missing.is_empty(), "absent: {missing:?}");
    }

    #[test]
    fn silence_unusable() {
        let t = AudioTrack::from_f64(&silence(2.0, 16000), 16000);
        let v = audio_feature_vector(&t, &AnalysisConfig::default());
        assert!(!v.usable);
        assert_eq!(v.absent_count(), 53);
    }

    #[test]
    fn deterministic() {
        let a = audio_feature_vector(&speechlike(), &AnalysisConfig::default());
        let b = audio_feature_vector(&speechlike(), &AnalysisConfig::default());
        let bits = |v: &FeatureVector| v.values.iter().map(|x| x.map(f64::to_bits)).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
    }

    #[test]
    fn quantiles() {
        let x = [4.0, 1.0, 3.0, 2.0];
        assert_eq!(quantile(&x, 0.5), Some(2.5));
        assert_eq!(quantile(&x, 0.25), Some(1.75));
        assert_eq!(pop_sd(&[1.0, 3.0]), Some(1.0));
    }
}
