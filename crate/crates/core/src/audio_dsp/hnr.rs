//! Harmonics-to-noise ratio from the autocorrelation peak strength.

use super::pitch::PitchTrack;
use super::AudioError;

/// Per-window HNR is clamped to ±this many dB.
pub const HNR_CAP_DB: f64 = 40.0;

/// 10·log10(r / (1 - r)), clamped to ±`HNR_CAP_DB`.
pub fn hnr_db(r: f64) -> f64 {
    let db = 10.0 * (r / (1.0 - r)).log10();
    if db.is_nan() {
        -HNR_CAP_DB
    } else {
        db.clamp(-HNR_CAP_DB, HNR_CAP_DB)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HnrStats {
    pub mean_db: f64,
    /// Population standard deviation across windows.
    pub sd_db: f64,
    pub windows: usize,
}

/// Averages per-window HNR over every analyzed (voice-active) window. Noisy
/// windows that fail the voicing test still count, so aperiodic sound
/// yields a low rather than missing value.
pub fn hnr(track: &PitchTrack) -> Result<HnrStats, AudioError> {
    let values: Vec<f64> = track
        .frames
        .iter()
        .filter(|f| f.analyzed)
        .map(|f| hnr_db(f.strength))
        .collect();
    if values.is_empty() {
        return Err(AudioError::NoVoicedContent);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    Ok(HnrStats {
        mean_db: mean,
        sd_db: var.sqrt(),
        windows: values.len(),
    })
}
