//! Speech timing: phonation, pauses, syllable nuclei and rates.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::config::AnalysisConfig;

use super::vad::VadSegments;

pub const INTENSITY_HOP_S: f64 = 0.010;
pub const INTENSITY_WINDOW_S: f64 = 0.050;
/// Intensity of digital silence, dBFS.
const INTENSITY_FLOOR_DB: f64 = -120.0;

/// Hann-weighted short-time intensity in dBFS.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityContour {
    /// Frame centers, seconds.
    pub times: Vec<f64>,
    pub db: Vec<f64>,
}

impl IntensityContour {
    /// Values whose frame center lies in `[t0, t1]`.
    pub fn within(&self, t0: f64, t1: f64) -> &[f64] {
        let a = self.times.partition_point(|&t| t < t0);
        let b = self.times.partition_point(|&t| t <= t1);
        &self.db[a..b.max(a)]
    }
}

pub fn intensity_contour(x: &[f64], sample_rate: f64) -> IntensityContour {
    let win = ((INTENSITY_WINDOW_S * sample_rate).round() as usize).max(1);
    let hop = ((INTENSITY_HOP_S * sample_rate).round() as usize).max(1);
    let weights: Vec<f64> = (0..win)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * (i as f64 + 0.5) / win as f64).cos())
        .collect();
    let wsum: f64 = weights.iter().sum();
    let mut times = Vec::new();
    let mut db = Vec::new();
    let mut start = 0;
    while start + win <= x.len() {
        let ms = x[start..start + win]
            .iter()
            .zip(&weights)
            .map(|(v, w)| v * v * w)
            .sum::<f64>()
            / wsum;
        times.push((start as f64 + win as f64 / 2.0) / sample_rate);
        db.push(if ms > 0.0 { (10.0 * ms.log10()).max(INTENSITY_FLOOR_DB) } else { INTENSITY_FLOOR_DB });
        start += hop;
    }
    IntensityContour { times, db }
}

/// Counts intensity peaks that rise at least `dip_db` above the lowest point
/// since the previous counted peak (or the start of the run).
pub fn count_nuclei(contour: &[f64], dip_db: f64) -> usize {
    let at = |i: isize| -> f64 {
        if i < 0 || i as usize >= contour.len() {
            f64::NEG_INFINITY
        } else {
            contour[i as usize]
        }
    };
    let mut count = 0;
    // None until the first frame: a run starting on a peak counts it
    let mut dip: Option<f64> = None;
    for i in 0..contour.len() as isize {
        let v = at(i);
        let is_peak = v > at(i - 1) && v >= at(i + 1);
        if is_peak && dip.is_none_or(|d| v - d >= dip_db) {
            count += 1;
            dip = Some(v);
        } else {
            dip = Some(dip.map_or(v, |d| d.min(v)));
        }
    }
    count
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeechStats {
    pub speech_duration_s: f64,
    pub syllable_count: usize,
    pub phonation_time_s: f64,
    pub pause_count: usize,
    pub total_pause_s: f64,
    pub voiced_segment_count: usize,
    /// Syllables per second of speech; absent for zero duration.
    pub speech_rate_per_s: Option<f64>,
    /// Syllables per second of phonation; absent for zero phonation.
    pub articulation_rate_per_s: Option<f64>,
    pub phonation_ratio: Option<f64>,
}

impl SpeechStats {
    pub fn from_parts(
        speech_duration_s: f64,
        phonation_time_s: f64,
        syllable_count: usize,
        pause_count: usize,
        total_pause_s: f64,
        voiced_segment_count: usize,
    ) -> Self {
        let per = |den: f64| (den > 0.0).then(|| syllable_count as f64 / den);
        Self {
            speech_duration_s,
            syllable_count,
            phonation_time_s,
            pause_count,
            total_pause_s,
            voiced_segment_count,
            speech_rate_per_s: per(speech_duration_s),
            articulation_rate_per_s: per(phonation_time_s),
            phonation_ratio: (speech_duration_s > 0.0).then(|| phonation_time_s / speech_duration_s),
        }
    }
}

/// Gaps between consecutive segments of at least `min_s`: (count, total).
pub fn pauses(segments: &VadSegments, min_s: f64) -> (usize, f64) {
    segments
        .spans()
        .windows(2)
        .map(|w| w[1].0 - w[0].1)
        .filter(|&g| g >= min_s)
        .fold((0, 0.0), |(n, t), g| (n + 1, t + g))
}

/// Timing statistics of a track given its voice-activity segments.
pub fn speech_stats(x: &[f64], sample_rate: f64, segments: &VadSegments, cfg: &AnalysisConfig) -> SpeechStats {
    let contour = intensity_contour(x, sample_rate);
    let syllables = segments
        .spans()
        .iter()
        .map(|&(s, e)| count_nuclei(contour.within(s, e), cfg.syllable.dip_db))
        .sum();
    let (pause_count, total_pause) = pauses(segments, cfg.pause.min_s);
    SpeechStats::from_parts(
        x.len() as f64 / sample_rate,
        segments.total_s(),
        syllables,
        pause_count,
        total_pause,
        segments.len(),
    )
}
