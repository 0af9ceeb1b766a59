//! Cycle-to-cycle period (jitter) and amplitude (shimmer) perturbation.

use super::pitch::PitchTrack;
use super::AudioError;

fn need(n: usize, needed: usize) -> Result<(), AudioError> {
    if n < needed {
        Err(AudioError::TooFewPeriods { needed, got: n })
    } else {
        Ok(())
    }
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn mean_abs_diff(x: &[f64]) -> f64 {
    x.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>() / (x.len() - 1) as f64
}

/// Mean absolute deviation of each interior value from the centered
/// `width`-point moving average.
fn mean_abs_dev_from_average(x: &[f64], width: usize) -> f64 {
    let half = width / 2;
    let n = x.len() - 2 * half;
    (half..x.len() - half)
        .map(|k| {
            let avg = x[k - half..=k + half].iter().sum::<f64>() / width as f64;
            (x[k] - avg).abs()
        })
        .sum::<f64>()
        / n as f64
}

/// Local jitter: mean |T[k+1] - T[k]| / mean T.
pub fn jitter(periods: &[f64]) -> Result<f64, AudioError> {
    need(periods.len(), 2)?;
    Ok(mean_abs_diff(periods) / mean(periods))
}

/// Mean absolute period difference in seconds.
pub fn jitter_abs(periods: &[f64]) -> Result<f64, AudioError> {
    need(periods.len(), 2)?;
    Ok(mean_abs_diff(periods))
}

/// Relative average perturbation (3-point).
pub fn jitter_rap(periods: &[f64]) -> Result<f64, AudioError> {
    need(periods.len(), 3)?;
    Ok(mean_abs_dev_from_average(periods, 3) / mean(periods))
}

/// Five-point period perturbation quotient.
pub fn jitter_ppq5(periods: &[f64]) -> Result<f64, AudioError> {
    need(periods.len(), 5)?;
    Ok(mean_abs_dev_from_average(periods, 5) / mean(periods))
}

/// Local shimmer: mean |A[k+1] - A[k]| / mean A.
pub fn shimmer(amplitudes: &[f64]) -> Result<f64, AudioError> {
    need(amplitudes.len(), 2)?;
    Ok(mean_abs_diff(amplitudes) / mean(amplitudes))
}

/// Mean |20 log10(A[k+1] / A[k])|.
pub fn shimmer_db(amplitudes: &[f64]) -> Result<f64, AudioError> {
    need(amplitudes.len(), 2)?;
    if amplitudes.iter().any(|&a| !(a > 0.0)) {
        return Err(AudioError::InvalidParameter("shimmer_db needs positive amplitudes".into()));
    }
    Ok(amplitudes
        .windows(2)
        .map(|w| (20.0 * (w[1] / w[0]).log10()).abs())
        .sum::<f64>()
        / (amplitudes.len() - 1) as f64)
}

pub fn shimmer_apq3(amplitudes: &[f64]) -> Result<f64, AudioError> {
    need(amplitudes.len(), 3)?;
    Ok(mean_abs_dev_from_average(amplitudes, 3) / mean(amplitudes))
}

pub fn shimmer_apq5(amplitudes: &[f64]) -> Result<f64, AudioError> {
    need(amplitudes.len(), 5)?;
    Ok(mean_abs_dev_from_average(amplitudes, 5) / mean(amplitudes))
}

/// Peak times (seconds) and amplitudes of successive glottal cycles.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Cycles {
    pub times: Vec<f64>,
    pub amplitudes: Vec<f64>,
}

impl Cycles {
    pub fn periods(&self) -> Vec<f64> {
        self.times.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

fn parabolic_peak(x: &[f64], i: usize) -> (f64, f64) {
    if i == 0 || i + 1 >= x.len() {
        return (i as f64, x[i]);
    }
    let (a, b, c) = (x[i - 1], x[i], x[i + 1]);
    let denom = a - 2.0 * b + c;
    if denom >= 0.0 {
        return (i as f64, b);
    }
    let d = 0.5 * (a - c) / denom;
    (i as f64 + d, b - 0.25 * (a - c) * d)
}

fn argmax(x: &[f64], lo: usize, hi: usize) -> usize {
    let mut best = lo;
    for i in lo..hi {
        if x[i] > x[best] {
            best = i;
        }
    }
    best
}

/// Picks one waveform maximum per cycle: the largest sample in the first
/// period, then the largest within ±30% of one period after each previous
/// peak. Positions and heights are parabolically interpolated.
pub fn extract_cycles(x: &[f64], sample_rate: f64, f0: f64) -> Cycles {
    let period = sample_rate / f0;
    let mut cycles = Cycles::default();
    if x.len() < (2.0 * period) as usize + 2 {
        return cycles;
    }
    let mut idx = argmax(x, 0, period.ceil() as usize);
    loop {
        let (pos, amp) = parabolic_peak(x, idx);
        cycles.times.push(pos / sample_rate);
        cycles.amplitudes.push(amp);
        let lo = (idx as f64 + 0.7 * period).round() as usize;
        let hi = ((idx as f64 + 1.3 * period).round() as usize).min(x.len());
        if lo >= hi || hi == x.len() {
            break;
        }
        idx = argmax(x, lo, hi);
    }
    cycles
}

/// Jitter and shimmer variants averaged over voiced windows. Entries are
/// `None` when no window had enough cycles.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Perturbation {
    pub jitter_local: Option<f64>,
    pub jitter_local_abs_s: Option<f64>,
    pub jitter_rap: Option<f64>,
    pub jitter_ppq5: Option<f64>,
    pub shimmer_local: Option<f64>,
    pub shimmer_local_db: Option<f64>,
    pub shimmer_apq3: Option<f64>,
    pub shimmer_apq5: Option<f64>,
}

fn window_mean(values: Vec<f64>) -> Option<f64> {
    (!values.is_empty()).then(|| mean(&values))
}

pub fn perturbation(x: &[f64], sample_rate: f64, track: &PitchTrack) -> Perturbation {
    type Measure = fn(&[f64]) -> Result<f64, AudioError>;
    let period_measures: [Measure; 4] = [jitter, jitter_abs, jitter_rap, jitter_ppq5];
    let amp_measures: [Measure; 4] = [shimmer, shimmer_db, shimmer_apq3, shimmer_apq5];
    let mut acc: [Vec<f64>; 8] = Default::default();
    for frame in track.voiced() {
        let s = (frame.t * sample_rate).round() as usize;
        let e = (s + frame.len).min(x.len());
        let cycles = extract_cycles(&x[s..e], sample_rate, frame.f0.unwrap());
        let periods = cycles.periods();
        for (k, m) in period_measures.iter().enumerate() {
            if let Ok(v) = m(&periods) {
                acc[k].push(v);
            }
        }
        for (k, m) in amp_measures.iter().enumerate() {
            if let Ok(v) = m(&cycles.amplitudes) {
                acc[4 + k].push(v);
            }
        }
    }
    let [a, b, c, d, e, f, g, h] = acc.map(window_mean);
    Perturbation {
        jitter_local: a,
        jitter_local_abs_s: b,
        jitter_rap: c,
        jitter_ppq5: d,
        shimmer_local: e,
        shimmer_local_db: f,
        shimmer_apq3: g,
        shimmer_apq5: h,
    }
}
