//! Energy and zero-crossing voice-activity detection on 10 ms frames.

use serde::{Deserialize, Serialize};

use crate::config::VadConfig;
use crate::session_store::AudioTrack;

use super::AudioError;

/// Sorted, non-overlapping active spans in seconds.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct VadSegments {
    spans: Vec<(f64, f64)>,
}

impl VadSegments {
    pub fn new(spans: Vec<(f64, f64)>) -> Result<Self, AudioError> {
        for (i, &(s, e)) in spans.iter().enumerate() {
            if !(e > s) || (i > 0 && s < spans[i - 1].1) {
                return Err(AudioError::InvalidParameter(format!("bad segment {i}: ({s}, {e})")));
            }
        }
        Ok(Self { spans })
    }

    pub fn spans(&self) -> &[(f64, f64)] {
        &self.spans
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    pub fn len(&self) -> usize {
        self.spans.len()
    }

    pub fn total_s(&self) -> f64 {
        self.spans.iter().map(|(s, e)| e - s).sum()
    }

    /// Shifts every span by `-offset`.
    pub fn rebased(&self, offset: f64) -> Self {
        Self {
            spans: self.spans.iter().map(|&(s, e)| (s - offset, e - offset)).collect(),
        }
    }
}

pub(crate) struct FrameStats {
    pub energy_db: Vec<f64>,
    pub zcr: Vec<f64>,
}

pub(crate) fn frame_stats(x: &[f32], frame_len: usize) -> FrameStats {
    let mut energy_db = Vec::with_capacity(x.len() / frame_len + 1);
    let mut zcr = Vec::with_capacity(energy_db.capacity());
    for frame in x.chunks(frame_len) {
        let ms = frame.iter().map(|&s| (s as f64) * (s as f64)).sum::<f64>() / frame.len() as f64;
        energy_db.push(if ms > 0.0 { 10.0 * ms.log10() } else { f64::NEG_INFINITY });
        let crossings = frame
            .windows(2)
            .filter(|w| (w[0] >= 0.0) != (w[1] >= 0.0))
            .count();
        zcr.push(crossings as f64 / (frame.len().max(2) - 1) as f64);
    }
    FrameStats { energy_db, zcr }
}

/// Frame-level decisions: energy above a threshold relative to the loudest
/// frame (noisy, high-ZCR frames need an extra margin), short inactive gaps
/// bridged by the hangover, and very short active runs discarded.
pub fn vad(track: &AudioTrack, cfg: &VadConfig) -> Result<VadSegments, AudioError> {
    if track.samples.is_empty() {
        return Err(AudioError::EmptyAudio);
    }
    let fs = track.sample_rate as f64;
    let frame_len = ((cfg.frame_ms * fs / 1000.0).round() as usize).max(1);
    let stats = frame_stats(&track.samples, frame_len);
    let peak = stats.energy_db.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if peak == f64::NEG_INFINITY {
        return Ok(VadSegments::default());
    }
    let threshold = (peak + cfg.threshold_db).max(cfg.floor_dbfs);
    let mut active: Vec<bool> = stats
        .energy_db
        .iter()
        .zip(&stats.zcr)
        .map(|(&e, &z)| {
            let margin = if z > cfg.zcr_max { cfg.zcr_margin_db } else { 0.0 };
            e >= threshold + margin
        })
        .collect();

    let hangover = (cfg.hangover_ms / cfg.frame_ms).round() as usize;
    fill_runs(&mut active, false, |run, bounded| bounded && run <= hangover);
    let min_run = (cfg.min_segment_ms / cfg.frame_ms).ceil() as usize;
    fill_runs(&mut active, true, |run, _| run < min_run);

    let n = track.samples.len();
    let mut spans = Vec::new();
    let mut k = 0;
    while k < active.len() {
        if !active[k] {
            k += 1;
            continue;
        }
        let start = k;
        while k < active.len() && active[k] {
            k += 1;
        }
        let s = (start * frame_len) as f64 / fs;
        let e = ((k * frame_len).min(n)) as f64 / fs;
        spans.push((s, e));
    }
    VadSegments::new(spans)
}

/// Flips runs of `value` for which `flip(len, bounded)` holds; `bounded` is
/// true when the run has opposite-valued neighbours on both sides.
fn fill_runs(flags: &mut [bool], value: bool, flip: impl Fn(usize, bool) -> bool) {
    let n = flags.len();
    let mut k = 0;
    while k < n {
        if flags[k] != value {
            k += 1;
            continue;
        }
        let start = k;
        while k < n && flags[k] == value {
            k += 1;
        }
        let bounded = start > 0 && k < n;
        if flip(k - start, bounded) {
            flags[start..k].iter_mut().for_each(|f| *f = !value);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::audio::{silence, sine, white_noise};

    #[test]
    fn silence_has_no_segments() {
        let t = AudioTrack::from_f64(&silence(2.0, 16000), 16000);
        assert!(vad(&t, &VadConfig::default()).unwrap().is_empty());
    }

    #[test]
    fn tone_burst_boundaries() {
        // -6 dBFS peak amplitude
        let amp = 10f64.powf(-6.0 / 20.0);
        let mut x = silence(1.0, 16000);
        x.extend(sine(440.0, amp, 1.0, 16000));
        x.extend(silence(1.0, 16000));
        let t = AudioTrack::from_f64(&x, 16000);
        let v = vad(&t, &VadConfig::default()).unwrap();
        assert_eq!(v.len(), 1);
        let (s, e) = v.spans()[0];
        assert!((s - 1.0).abs() <= 0.03, "start {s}");
        assert!((e - 2.0).abs() <= 0.03, "end {e}");
    }

    #[test]
    fn full_scale_noise_is_one_segment() {
        let t = AudioTrack::from_f64(&white_noise(1.0, 2.0, 16000, 7), 16000);
        let v = vad(&t, &VadConfig::default()).unwrap();
        assert_eq!(v.spans(), &[(0.0, 2.0)]);
    }

    #[test]
    fn short_gap_bridged_long_gap_kept() {
        let mut x = sine(200.0, 0.5, 0.5, 16000);
        x.extend(silence(0.05, 16000));
        x.extend(sine(200.0, 0.5, 0.5, 16000));
        x.extend(silence(0.5, 16000));
        x.extend(sine(200.0, 0.5, 0.5, 16000));
        let t = AudioTrack::from_f64(&x, 16000);
        let v = vad(&t, &VadConfig::default()).unwrap();
        assert_eq!(v.len(), 2, "{:?}", v.spans());
    }

    #[test]
    fn empty_audio_error() {
        let t = AudioTrack::unchecked(vec![], 16000);
        assert!(matches!(vad(&t, &VadConfig::default()), Err(AudioError::EmptyAudio)));
    }
}
