//! High-pass filtering, silence removal and band-limited resampling.

use std::f64::consts::PI;

use crate::config::AnalysisConfig;
use crate::session_store::AudioTrack;

use super::vad::{vad, VadSegments};
use super::AudioError;

/// Length of the odd reflection run through the filter ahead of the signal
/// so the start-up transient settles before the first real sample.
const HIGHPASS_LEAD_S: f64 = 0.1;

/// Second-order Butterworth high-pass (RBJ biquad), applied in place.
pub fn highpass(x: &mut [f64], sample_rate: f64, cutoff_hz: f64) {
    if x.is_empty() {
        return;
    }
    let w0 = 2.0 * PI * cutoff_hz / sample_rate;
    let (sin, cos) = w0.sin_cos();
    let q = std::f64::consts::FRAC_1_SQRT_2;
    let alpha = sin / (2.0 * q);
    let a0 = 1.0 + alpha;
    let b0 = (1.0 + cos) / 2.0 / a0;
    let b1 = -(1.0 + cos) / a0;
    let b2 = b0;
    let a1 = -2.0 * cos / a0;
    let a2 = (1.0 - alpha) / a0;
    let (mut x1, mut x2, mut y1, mut y2) = (0.0, 0.0, 0.0, 0.0);
    let lead = ((HIGHPASS_LEAD_S * sample_rate) as usize).min(x.len() - 1);
    for i in (1..=lead).rev() {
        let x0 = 2.0 * x[0] - x[i];
        let y0 = b0 * x0 + b1 * x1 + b2 * x2 - a1 * y1 - a2 * y2;
        x2 = x1;
        x1 = x0;
        y2 = y1;
        y1 = y0;
    }
    for s in x.iter_mut() {
        let x0 = *s;
        let y0 = b0 * x0 + b1 * x1 + b2 * x2 - a1 * y1 - a2 * y2;
        x2 = x1;
        x1 = x0;
        y2 = y1;
        y1 = y0;
        *s = y0;
    }
}

/// Merges segments separated by less than `min_gap_s` and returns the
/// resulting spans in seconds.
pub fn merge_short_gaps(segments: &VadSegments, min_gap_s: f64) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for &(s, e) in segments.spans() {
        match out.last_mut() {
            Some(last) if s - last.1 < min_gap_s => last.1 = e,
            _ => out.push((s, e)),
        }
    }
    out
}

/// High-pass filters the track and splices out silences of at least
/// `pause.min_s` (leading and trailing silence included). Shorter gaps stay.
pub fn preprocess(track: &AudioTrack, cfg: &AnalysisConfig) -> Result<AudioTrack, AudioError> {
    if track.samples.is_empty() {
        return Err(AudioError::EmptyAudio);
    }
    let fs = track.sample_rate as f64;
    let mut x = track.to_f64();
    highpass(&mut x, fs, cfg.highpass.cutoff_hz);
    let filtered = AudioTrack::from_f64(&x, track.sample_rate);
    let segments = vad(&filtered, &cfg.vad)?;
    Ok(AudioTrack::from_f64(&splice(&x, fs, &segments, cfg.pause.min_s), track.sample_rate))
}

/// Concatenates the active spans, keeping gaps shorter than `min_gap_s`.
pub(crate) fn splice(x: &[f64], fs: f64, segments: &VadSegments, min_gap_s: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len());
    for (s, e) in merge_short_gaps(segments, min_gap_s) {
        let a = ((s * fs).round() as usize).min(x.len());
        let b = ((e * fs).round() as usize).min(x.len());
        out.extend_from_slice(&x[a..b]);
    }
    out
}

/// Windowed-sinc resampler with the cutoff just below the lower Nyquist.
pub fn resample(x: &[f64], from_hz: f64, to_hz: f64) -> Vec<f64> {
    if x.is_empty() {
        return Vec::new();
    }
    if (from_hz - to_hz).abs() < 1e-9 {
        return x.to_vec();
    }
    const ZERO_CROSSINGS: f64 = 16.0;
    let cutoff = 0.45 * from_hz.min(to_hz);
    // normalized to input samples
    let fc = cutoff / from_hz;
    let half_width = ZERO_CROSSINGS / (2.0 * fc);
    let n_out = ((x.len() as f64) * to_hz / from_hz).floor() as usize;
    let mut y = Vec::with_capacity(n_out);
    for n in 0..n_out {
        let center = n as f64 * from_hz / to_hz;
        let lo = ((center - half_width).ceil().max(0.0)) as usize;
        let hi = ((center + half_width).floor() as usize).min(x.len() - 1);
        let mut acc = 0.0;
        for (k, &xk) in x.iter().enumerate().take(hi + 1).skip(lo) {
            let u = center - k as f64;
            let arg = 2.0 * fc * u;
            let sinc = if arg.abs() < 1e-12 { 1.0 } else { (PI * arg).sin() / (PI * arg) };
            // Blackman window over [-half_width, half_width]
            let w = {
                let r = (u / half_width + 1.0) / 2.0;
                0.42 - 0.5 * (2.0 * PI * r).cos() + 0.08 * (4.0 * PI * r).cos()
            };
            acc += xk * 2.0 * fc * sinc * w;
        }
        y.push(acc);
    }
    y
}
