//! Autocorrelation pitch tracking on fixed, non-overlapping windows.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::config::PitchConfig;

use super::vad::VadSegments;

/// Local maxima within this much of the global peak are treated as equal,
/// so the shortest lag (highest pitch) wins over subharmonic peaks.
const OCTAVE_SLACK: f64 = 0.03;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PitchFrame {
    /// Window start, seconds.
    pub t: f64,
    /// Window length in samples (the last window may be short).
    pub len: usize,
    /// False when the window had too little voice activity to analyze.
    pub analyzed: bool,
    pub f0: Option<f64>,
    /// Normalized autocorrelation at the chosen lag, in [0, 1].
    pub strength: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PitchTrack {
    pub window_s: f64,
    pub frames: Vec<PitchFrame>,
}

impl PitchTrack {
    pub fn voiced(&self) -> impl Iterator<Item = &PitchFrame> {
        self.frames.iter().filter(|f| f.f0.is_some())
    }

    pub fn f0_values(&self) -> Vec<f64> {
        self.frames.iter().filter_map(|f| f.f0).collect()
    }
}

/// Peak of the normalized autocorrelation over the allowed lag range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct LagPeak {
    pub lag: f64,
    pub r: f64,
}

/// Reusable FFT plans for one window length.
pub(crate) struct Correlator {
    n_fft: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Correlator {
    pub fn new(max_len: usize) -> Self {
        let n_fft = (2 * max_len).next_power_of_two();
        let mut planner = FftPlanner::new();
        Self {
            n_fft,
            fwd: planner.plan_fft_forward(n_fft),
            inv: planner.plan_fft_inverse(n_fft),
        }
    }

    /// Normalized cross-correlation of the window with its lagged self,
    /// r(τ) = Σ x[n]x[n+τ] / sqrt(Σ x[n]² · Σ x[n+τ]²), for τ in `lags`.
    pub fn normalized(&self, x: &[f64], lags: std::ops::RangeInclusive<usize>) -> Vec<f64> {
        let w = x.len();
        let mean = x.iter().sum::<f64>() / w as f64;
        let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v - mean, 0.0)).collect();
        buf.resize(self.n_fft, Complex::new(0.0, 0.0));
        self.fwd.process(&mut buf);
        for c in buf.iter_mut() {
            *c = Complex::new(c.norm_sqr(), 0.0);
        }
        self.inv.process(&mut buf);
        let scale = 1.0 / self.n_fft as f64;

        let mut prefix = Vec::with_capacity(w + 1);
        prefix.push(0.0);
        for &v in x {
            let d = v - mean;
            prefix.push(prefix.last().unwrap() + d * d);
        }
        let total = prefix[w];
        lags.map(|tau| {
            if tau >= w {
                return 0.0;
            }
            let e1 = prefix[w - tau];
            let e2 = total - prefix[tau];
            let denom = (e1 * e2).sqrt();
            if denom <= total * 1e-12 || denom == 0.0 {
                0.0
            } else {
                (buf[tau].re * scale / denom).clamp(-1.0, 1.0)
            }
        })
        .collect()
    }

    /// First local maximum within `OCTAVE_SLACK` of the best one, refined by
    /// parabolic interpolation. `None` for silent or too-short windows.
    pub fn best_lag(&self, x: &[f64], min_lag: usize, max_lag: usize) -> Option<LagPeak> {
        if x.len() < 2 * min_lag + 2 || max_lag <= min_lag {
            return None;
        }
        let max_lag = max_lag.min(x.len() / 2);
        if max_lag <= min_lag + 1 {
            return None;
        }
        // one extra lag on each side so endpoints can be local maxima tests
        let lo = min_lag - 1;
        let r = self.normalized(x, lo..=max_lag + 1);
        let peaks: Vec<usize> = (1..r.len() - 1)
            .filter(|&i| r[i] > r[i - 1] && r[i] >= r[i + 1])
            .collect();
        let r_max = peaks.iter().map(|&i| r[i]).fold(f64::NEG_INFINITY, f64::max);
        if !(r_max > 0.0) {
            return None;
        }
        let i = *peaks.iter().find(|&&i| r[i] >= r_max - OCTAVE_SLACK)?;
        let (a, b, c) = (r[i - 1], r[i], r[i + 1]);
        let denom = a - 2.0 * b + c;
        let (delta, peak) = if denom < 0.0 {
            let d = 0.5 * (a - c) / denom;
            (d, b - 0.25 * (a - c) * d)
        } else {
            (0.0, b)
        };
        Some(LagPeak {
            lag: (lo + i) as f64 + delta,
            r: peak.clamp(0.0, 1.0),
        })
    }
}

/// Fraction of `[t0, t1)` covered by the segments.
pub(crate) fn active_fraction(segments: &VadSegments, t0: f64, t1: f64) -> f64 {
    let covered: f64 = segments
        .spans()
        .iter()
        .map(|&(s, e)| (e.min(t1) - s.max(t0)).max(0.0))
        .sum();
    covered / (t1 - t0)
}

/// Window boundaries in samples; a trailing remainder shorter than three
/// floor periods is dropped.
pub(crate) fn windows(n: usize, sample_rate: f64, cfg: &PitchConfig) -> Vec<(usize, usize)> {
    let w = (cfg.window_s * sample_rate).round() as usize;
    let min_len = (3.0 * sample_rate / cfg.floor_hz).ceil() as usize;
    let mut out = Vec::new();
    let mut s = 0;
    while s < n {
        let e = (s + w).min(n);
        if e - s >= min_len.min(w) {
            out.push((s, e));
        }
        s += w;
    }
    out
}

/// F0 per window: the window is analyzed when enough of it is voice-active,
/// and voiced when the autocorrelation peak clears the voicing threshold.
pub fn f0_track(x: &[f64], sample_rate: f64, segments: &VadSegments, cfg: &PitchConfig) -> PitchTrack {
    let wins = windows(x.len(), sample_rate, cfg);
    let max_len = wins.iter().map(|(s, e)| e - s).max().unwrap_or(1);
    let corr = Correlator::new(max_len);
    let min_lag = ((sample_rate / cfg.ceiling_hz).floor() as usize).max(2);
    let max_lag = (sample_rate / cfg.floor_hz).ceil() as usize;
    let frames = wins
        .into_iter()
        .map(|(s, e)| {
            let t0 = s as f64 / sample_rate;
            let t1 = e as f64 / sample_rate;
            let mut frame = PitchFrame {
                t: t0,
                len: e - s,
                analyzed: false,
                f0: None,
                strength: 0.0,
            };
            if active_fraction(segments, t0, t1) < cfg.min_active_fraction {
                return frame;
            }
            frame.analyzed = true;
            if let Some(peak) = corr.best_lag(&x[s..e], min_lag, max_lag) {
                frame.strength = peak.r;
                let f0 = sample_rate / peak.lag;
                if peak.r >= cfg.voicing_threshold && f0 >= cfg.floor_hz && f0 <= cfg.ceiling_hz {
                    frame.f0 = Some(f0);
                }
            }
            frame
        })
        .collect();
    PitchTrack {
        window_s: cfg.window_s,
        frames,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::audio::{pulse_train, silence, sine};

    fn all_active(dur: f64) -> VadSegments {
        VadSegments::new(vec![(0.0, dur)]).unwrap()
    }

    #[test]
    fn sine_220() {
        let x = sine(220.0, 0.5, 3.0, 16000);
        let tr = f0_track(&x, 16000.0, &all_active(3.0), &PitchConfig::default());
        assert_eq!(tr.frames.len(), 6);
        for f in &tr.frames {
            let f0 = f.f0.expect("voiced");
            assert!((f0 - 220.0).abs() <= 2.0, "{f0}");
        }
    }

    #[test]
    fn silence_unvoiced() {
        let x = silence(3.0, 16000);
        let tr = f0_track(&x, 16000.0, &all_active(3.0), &PitchConfig::default());
        assert!(tr.frames.iter().all(|f| f.f0.is_none()));
    }

    #[test]
    fn pulse_train_100() {
        let x = pulse_train(100.0, 0.5, 3.0, 16000);
        let tr = f0_track(&x, 16000.0, &all_active(3.0), &PitchConfig::default());
        for f in &tr.frames {
            let f0 = f.f0.expect("voiced");
            assert!((f0 - 100.0).abs() <= 1.0, "{f0}");
        }
    }

    #[test]
    fn high_pitch_not_halved() {
        for hz in [90.0, 137.0, 310.0, 480.0] {
            let x = sine(hz, 0.5, 1.0, 16000);
            let tr = f0_track(&x, 16000.0, &all_active(1.0), &PitchConfig::default());
            let f0 = tr.frames[0].f0.unwrap();
            assert!((f0 / hz - 1.0).abs() < 0.01, "{hz}: {f0}");
        }
    }

    #[test]
    fn inactive_windows_skipped() {
        let x = sine(220.0, 0.5, 2.0, 16000);
        let segs = VadSegments::new(vec![(0.0, 1.0)]).unwrap();
        let tr = f0_track(&x, 16000.0, &segs, &PitchConfig::default());
        assert_eq!(tr.frames.iter().filter(|f| f.analyzed).count(), 2);
        assert_eq!(tr.voiced().count(), 2);
    }
}
