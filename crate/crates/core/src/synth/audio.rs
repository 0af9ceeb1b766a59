//! Test signals with known acoustic ground truth.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn n_samples(dur_s: f64, fs: u32) -> usize {
    (dur_s * fs as f64).round() as usize
}

pub fn sine(freq: f64, amp: f64, dur_s: f64, fs: u32) -> Vec<f64> {
    let w = 2.0 * PI * freq / fs as f64;
    (0..n_samples(dur_s, fs)).map(|n| amp * (w * n as f64).sin()).collect()
}

pub fn silence(dur_s: f64, fs: u32) -> Vec<f64> {
    vec![0.0; n_samples(dur_s, fs)]
}

/// Uniform noise in `[-amp, amp]`.
pub fn white_noise(amp: f64, dur_s: f64, fs: u32, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_samples(dur_s, fs)).map(|_| amp * rng.random_range(-1.0..=1.0)).collect()
}

/// Fraction of the period occupied by each glottal pulse.
const OPEN_QUOTIENT: f64 = 0.4;

/// Adds one raised-cosine pulse starting at `t0` seconds, evaluated exactly
/// at sample instants.
fn add_pulse(out: &mut [f64], fs: f64, t0: f64, width: f64, gain: f64) {
    let first = (t0 * fs).ceil().max(0.0) as usize;
    let last = (((t0 + width) * fs).floor() as usize).min(out.len().saturating_sub(1));
    for (n, o) in out.iter_mut().enumerate().take(last + 1).skip(first) {
        let u = (n as f64 / fs - t0) / width;
        *o += gain * (0.5 - 0.5 * (2.0 * PI * u).cos());
    }
}

/// Smooth glottal pulses at exactly `f0` Hz, peak `amp`.
pub fn pulse_train(f0: f64, amp: f64, dur_s: f64, fs: u32) -> Vec<f64> {
    let mut out = silence(dur_s, fs);
    let period = 1.0 / f0;
    let mut t = 0.0;
    let mut k = 0;
    while t < dur_s {
        add_pulse(&mut out, fs as f64, t, OPEN_QUOTIENT * period, amp);
        k += 1;
        t = k as f64 * period;
    }
    out
}

/// Cascade of two-pole resonators with unit gain at DC.
pub fn resonate(x: &mut [f64], fs: f64, formants: &[(f64, f64)]) {
    for &(f, bw) in formants {
        let r = (-PI * bw / fs).exp();
        let c1 = 2.0 * r * (2.0 * PI * f / fs).cos();
        let c2 = -r * r;
        let g = 1.0 - c1 - c2;
        let (mut y1, mut y2) = (0.0, 0.0);
        for s in x.iter_mut() {
            let y = g * *s + c1 * y1 + c2 * y2;
            y2 = y1;
            y1 = y;
            *s = y;
        }
    }
}

fn normalize_peak(x: &mut [f64], amp: f64) {
    let peak = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak > 0.0 {
        x.iter_mut().for_each(|v| *v *= amp / peak);
    }
}

/// Half-length of the band-limited impulse kernel, samples.
const IMPULSE_HALF: isize = 8;

/// Adds a band-limited (Hann-windowed sinc) unit impulse at fractional time
/// `t0` seconds, so excitation spectra stay flat without sample-grid jitter.
fn add_impulse(out: &mut [f64], fs: f64, t0: f64, gain: f64) {
    let center = t0 * fs;
    let base = center.floor() as isize;
    for n in base - IMPULSE_HALF + 1..=base + IMPULSE_HALF {
        if n < 0 || n as usize >= out.len() {
            continue;
        }
        let u = n as f64 - center;
        let sinc = if u.abs() < 1e-12 { 1.0 } else { (PI * u).sin() / (PI * u) };
        let w = 0.5 + 0.5 * (PI * u / IMPULSE_HALF as f64).cos();
        out[n as usize] += gain * sinc * w;
    }
}

/// Steady vowel: an impulse train at `f0` through the given (frequency,
/// bandwidth) resonators, scaled to peak `amp`.
pub fn vowel(f0: f64, formants: &[(f64, f64)], amp: f64, dur_s: f64, fs: u32) -> Vec<f64> {
    let mut out = silence(dur_s, fs);
    let period = 1.0 / f0;
    let mut k = 0;
    while (k as f64) * period < dur_s {
        add_impulse(&mut out, fs as f64, k as f64 * period, 1.0);
        k += 1;
    }
    resonate(&mut out, fs as f64, formants);
    normalize_peak(&mut out, amp);
    out
}

/// Formant frequencies of five vowels (F1..F4, Hz).
pub const VOWELS: [[f64; 4]; 5] = [
    [730.0, 1090.0, 2440.0, 3400.0],
    [270.0, 2290.0, 3010.0, 3500.0],
    [300.0, 870.0, 2240.0, 3400.0],
    [530.0, 1840.0, 2480.0, 3500.0],
    [570.0, 840.0, 2410.0, 3400.0],
];

fn with_bandwidths(f: &[f64; 4], scale: f64) -> Vec<(f64, f64)> {
    f.iter().map(|&hz| (hz * scale, 50.0 + 0.03 * hz * scale)).collect()
}

/// `n` syllables at `rate` per second: a vowel under a sin² envelope per
/// syllable, so each syllable is one intensity peak.
pub fn syllables(n: usize, rate: f64, f0: f64, amp: f64, fs: u32) -> Vec<f64> {
    let dur = n as f64 / rate;
    let mut x = vowel(f0, &with_bandwidths(&VOWELS[0], 1.0), amp, dur, fs);
    for (i, v) in x.iter_mut().enumerate() {
        let t = i as f64 / fs as f64;
        *v *= (PI * t * rate).sin().powi(2);
    }
    x
}

/// Voice and speaking-style parameters of [`speech`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoiceParams {
    pub f0_hz: f64,
    /// Relative standard deviation of cycle periods.
    pub jitter: f64,
    /// Relative standard deviation of cycle amplitudes.
    pub shimmer: f64,
    /// Multiplies every formant frequency (shorter tract above 1).
    pub formant_scale: f64,
    pub syllable_rate: f64,
    pub syllables_per_phrase: usize,
    pub pause_s: f64,
    pub amp: f64,
    /// Breath noise amplitude relative to `amp`, applied under the envelope.
    pub noise: f64,
}

impl Default for VoiceParams {
    fn default() -> Self {
        Self {
            f0_hz: 150.0,
            jitter: 0.005,
            shimmer: 0.03,
            formant_scale: 1.0,
            syllable_rate: 4.0,
            syllables_per_phrase: 6,
            pause_s: 0.5,
            amp: 0.5,
            noise: 0.02,
        }
    }
}

/// Phrases of syllables separated by pauses, with a slow intonation
/// contour, per-cycle jitter and shimmer, and breath noise.
pub fn speech(p: &VoiceParams, dur_s: f64, fs: u32, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let std = Normal::new(0.0, 1.0).expect("unit normal");
    let fsf = fs as f64;
    let n = n_samples(dur_s, fs);
    let mut out = Vec::with_capacity(n);
    let syl_len = (fsf / p.syllable_rate).round() as usize;
    'phrases: while out.len() < n {
        for _ in 0..p.syllables_per_phrase {
            let shape = VOWELS[rng.random_range(0..VOWELS.len())];
            let mut src = vec![0.0; syl_len];
            let start_t = out.len() as f64 / fsf;
            let mut t = 0.0;
            while t < syl_len as f64 / fsf {
                let abs_t = start_t + t;
                let f0 = p.f0_hz * (1.0 + 0.08 * (2.0 * PI * 0.4 * abs_t).sin());
                let period = (1.0 + p.jitter * std.sample(&mut rng)) / f0;
                let gain = (1.0 + p.shimmer * std.sample(&mut rng)).max(0.05);
                add_impulse(&mut src, fsf, t, gain);
                t += period.max(0.25 / f0);
            }
            resonate(&mut src, fsf, &with_bandwidths(&shape, p.formant_scale));
            for (i, v) in src.iter_mut().enumerate() {
                let env = (PI * i as f64 / syl_len as f64).sin().powi(2);
                *v = env * (*v + p.noise * rng.random_range(-1.0..=1.0) * 0.05);
            }
            out.extend(src);
            if out.len() >= n {
                break 'phrases;
            }
        }
        let pause = p.pause_s * rng.random_range(0.8..1.2);
        out.extend(std::iter::repeat_n(0.0, (pause * fsf).round() as usize));
    }
    out.truncate(n);
    normalize_peak(&mut out, p.amp);
    out
}

/// Speech-like audio with seeded, plausible voice parameters.
pub fn vowel_sequence(dur_s: f64, fs: u32, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let p = VoiceParams {
        f0_hz: rng.random_range(100.0..220.0),
        formant_scale: rng.random_range(0.9..1.15),
        ..VoiceParams::default()
    };
    speech(&p, dur_s, fs, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lengths_and_peaks() {
        assert_eq!(sine(100.0, 0.5, 1.0, 16000).len(), 16000);
        let x = vowel(120.0, &[(700.0, 80.0)], 0.4, 0.5, 16000);
        let peak = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!((peak - 0.4).abs() < 1e-12);
        assert_eq!(speech(&VoiceParams::default(), 3.0, 16000, 1).len(), 48000);
    }

    #[test]
    fn seeded() {
        assert_eq!(white_noise(1.0, 0.1, 16000, 4), white_noise(1.0, 0.1, 16000, 4));
        assert_ne!(vowel_sequence(1.0, 16000, 1), vowel_sequence(1.0, 16000, 2));
    }
}
