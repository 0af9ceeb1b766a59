//! Formant estimation by linear prediction.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::config::FormantConfig;

use super::filter::resample;
use super::pitch::PitchTrack;
use super::AudioError;

/// Added to the zero-lag autocorrelation (about -40 dB of white noise) so
/// near-singular spectra, like a pure tone, do not grow sharp spurious poles.
const NOISE_FLOOR: f64 = 1e-4;
/// Pre-emphasis turns up from this frequency.
const PRE_EMPHASIS_HZ: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resonance {
    pub freq_hz: f64,
    pub bandwidth_hz: f64,
}

/// LPC order for an analysis rate: two poles per kHz plus two.
pub fn lpc_order(sample_rate: f64) -> usize {
    (2.0 + sample_rate / 1000.0).round() as usize
}

/// Levinson-Durbin recursion. Returns `a[0..=p]` with `a[0] = 1` for the
/// predictor polynomial 1 + a1 z^-1 + ... + ap z^-p.
pub fn levinson(r: &[f64], order: usize) -> Option<Vec<f64>> {
    if r.len() <= order || !(r[0] > 0.0) {
        return None;
    }
    let mut a = vec![0.0; order + 1];
    a[0] = 1.0;
    let mut err = r[0];
    for i in 1..=order {
        let acc: f64 = (1..i).map(|j| a[j] * r[i - j]).sum::<f64>() + r[i];
        let k = -acc / err;
        let prev = a.clone();
        for j in 1..i {
            a[j] = prev[j] + k * prev[i - j];
        }
        a[i] = k;
        err *= 1.0 - k * k;
        if !(err > 0.0) {
            return None;
        }
    }
    Some(a)
}

/// Roots of the predictor polynomial in the upper half plane, converted to
/// frequency and bandwidth and sorted by frequency.
pub fn lpc_resonances(a: &[f64], sample_rate: f64) -> Vec<Resonance> {
    let p = a.len() - 1;
    if p == 0 {
        return Vec::new();
    }
    // companion matrix of z^p + a1 z^(p-1) + ... + ap
    let mut m = DMatrix::<f64>::zeros(p, p);
    for j in 0..p {
        m[(0, j)] = -a[j + 1];
    }
    for i in 1..p {
        m[(i, i - 1)] = 1.0;
    }
    let mut out: Vec<Resonance> = m
        .complex_eigenvalues()
        .iter()
        .filter(|z| z.im > 0.0)
        .map(|z| Resonance {
            freq_hz: z.im.atan2(z.re) * sample_rate / (2.0 * PI),
            bandwidth_hz: -z.norm().ln() * sample_rate / PI,
        })
        .collect();
    out.sort_by(|x, y| x.freq_hz.total_cmp(&y.freq_hz));
    out
}

/// Up to four formants of one analysis frame (already at the analysis rate).
pub fn frame_formants(x: &[f64], sample_rate: f64, cfg: &FormantConfig) -> Vec<Resonance> {
    let order = lpc_order(sample_rate);
    if x.len() <= 2 * order {
        return Vec::new();
    }
    let alpha = (-2.0 * PI * PRE_EMPHASIS_HZ / sample_rate).exp();
    let n = x.len();
    let y: Vec<f64> = (0..n)
        .map(|i| {
            let pre = if i == 0 { x[0] } else { x[i] - alpha * x[i - 1] };
            let w = 0.54 - 0.46 * (2.0 * PI * i as f64 / (n - 1) as f64).cos();
            pre * w
        })
        .collect();
    let mut r: Vec<f64> = (0..=order)
        .map(|lag| y[..n - lag].iter().zip(&y[lag..]).map(|(a, b)| a * b).sum())
        .collect();
    r[0] *= 1.0 + NOISE_FLOOR;
    let Some(a) = levinson(&r, order) else {
        return Vec::new();
    };
    lpc_resonances(&a, sample_rate)
        .into_iter()
        .filter(|c| c.freq_hz >= cfg.min_hz && c.freq_hz <= cfg.max_hz && c.bandwidth_hz <= cfg.max_bandwidth_hz)
        .take(4)
        .collect()
}

/// Per-window F1..F4 (`None` where a window had fewer candidates).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FormantTrack {
    pub frames: Vec<[Option<Resonance>; 4]>,
}

impl FormantTrack {
    /// Values of formant `i` (0-based) across windows where it was found.
    pub fn values(&self, i: usize) -> Vec<Resonance> {
        self.frames.iter().filter_map(|f| f[i]).collect()
    }
}

/// Runs LPC on each voiced pitch window after resampling to twice the
/// formant ceiling.
pub fn formants(x: &[f64], sample_rate: f64, pitch: &PitchTrack, cfg: &FormantConfig) -> Result<FormantTrack, AudioError> {
    if pitch.voiced().next().is_none() {
        return Err(AudioError::NoVoicedContent);
    }
    let analysis_rate = 2.0 * cfg.max_hz;
    let y = resample(x, sample_rate, analysis_rate);
    let frames = pitch
        .voiced()
        .map(|f| {
            let s = ((f.t * analysis_rate).round() as usize).min(y.len());
            let len = (f.len as f64 * analysis_rate / sample_rate).round() as usize;
            let e = (s + len).min(y.len());
            let found = frame_formants(&y[s..e], analysis_rate, cfg);
            let mut slots = [None; 4];
            for (slot, r) in slots.iter_mut().zip(found) {
                *slot = Some(r);
            }
            slots
        })
        .collect();
    Ok(FormantTrack { frames })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audio_dsp::pitch::f0_track;
    use crate::audio_dsp::vad::VadSegments;
    use crate::config::PitchConfig;
    use crate::synth::audio::{sine, vowel};

    fn track_of(x: &[f64]) -> FormantTrack {
        let dur = x.len() as f64 / 16000.0;
        let segs = VadSegments::new(vec![(0.0, dur)]).unwrap();
        let p = f0_track(x, 16000.0, &segs, &PitchConfig::default());
        formants(x, 16000.0, &p, &FormantConfig::default()).unwrap()
    }

    fn mean_freq(t: &FormantTrack, i: usize) -> f64 {
        let v = t.values(i);
        v.iter().map(|r| r.freq_hz).sum::<f64>() / v.len() as f64
    }

    #[test]
    fn levinson_recovers_ar2() {
        // x[n] = 1.2 x[n-1] - 0.5 x[n-2] + e; autocorrelation by Yule-Walker
        let (a1, a2) = (1.2, -0.5);
        let r1 = a1 / (1.0 - a2);
        let r2 = a1 * r1 + a2;
        let a = levinson(&[1.0, r1, r2], 2).unwrap();
        assert!((a[1] + a1).abs() < 1e-12 && (a[2] + a2).abs() < 1e-12);
    }

    #[test]
    fn resonance_from_known_pole() {
        let fs = 10000.0;
        let (f, bw) = (1000.0, 100.0);
        let r = (-PI * bw / fs).exp();
        let th = 2.0 * PI * f / fs;
        let res = lpc_resonances(&[1.0, -2.0 * r * th.cos(), r * r], fs);
        assert_eq!(res.len(), 1);
        assert!((res[0].freq_hz - f).abs() < 1e-9);
        assert!((res[0].bandwidth_hz - bw).abs() < 1e-9);
    }

    #[test]
    fn two_resonator_vowel() {
        let x = vowel(120.0, &[(700.0, 80.0), (1200.0, 90.0)], 0.5, 2.0, 16000);
        let t = track_of(&x);
        let f1 = mean_freq(&t, 0);
        let f2 = mean_freq(&t, 1);
        assert!((f1 / 700.0 - 1.0).abs() < 0.1, "F1 {f1}");
        assert!((f2 / 1200.0 - 1.0).abs() < 0.1, "F2 {f2}");
    }

    #[test]
    fn neutral_tube() {
        let targets = [500.0, 1500.0, 2500.0, 3500.0];
        let spec: Vec<(f64, f64)> = targets.iter().map(|&f| (f, 60.0 + f * 0.03)).collect();
        let x = vowel(110.0, &spec, 0.5, 2.0, 16000);
        let t = track_of(&x);
        for (i, target) in targets.iter().enumerate() {
            let f = mean_freq(&t, i);
            assert!((f / target - 1.0).abs() < 0.1, "F{} = {f}", i + 1);
        }
    }

    #[test]
    fn pure_sine_lacks_four_formants() {
        let t = track_of(&sine(220.0, 0.5, 2.0, 16000));
        assert!(t.frames.iter().all(|f| f[3].is_none()), "{:?}", t.frames[0]);
    }
}
