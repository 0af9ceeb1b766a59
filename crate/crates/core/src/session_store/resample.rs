use crate::emotion_space::EmotionFrame;

use super::model::{EventStream, ImpactValue, SampledSeries, Session};
use super::validate::validate_session;
use super::SessionError;

/// Render frame rate all streams are aligned to by default.
pub const DEFAULT_RATE_HZ: f64 = 30.0;

/// Frames needed to cover `duration` at `rate`: `ceil(duration * rate)`,
/// ignoring float noise just above an integer.
pub fn frame_count(duration: f64, rate: f64) -> usize {
    let exact = duration * rate;
    let rounded = exact.round();
    if (exact - rounded).abs() < 1e-9 {
        rounded as usize
    } else {
        exact.ceil() as usize
    }
}

/// Zero-order hold of the ordinal states sampled at frame centers
/// `t_k = (k + 0.5) / rate`. Markers do not affect the held state; the state
/// before the first ordinal event is neutral. An event exactly on a frame
/// center already applies to that frame.
///
/// # Panics
/// If `duration` or `rate` is not positive and finite.
pub fn resample_events(e: &EventStream, duration: f64, rate: f64) -> SampledSeries {
    assert!(duration > 0.0 && duration.is_finite(), "duration must be positive");
    assert!(rate > 0.0 && rate.is_finite(), "rate must be positive");
    let n = frame_count(duration, rate);
    let ordinal: Vec<(f64, i8)> = e
        .ordinal_events()
        .map(|ev| (ev.t, ev.value.valence().expect("ordinal")))
        .collect();
    let mut values = Vec::with_capacity(n);
    let mut next = 0;
    let mut state = 0i8;
    for k in 0..n {
        let center = (k as f64 + 0.5) / rate;
        while next < ordinal.len() && ordinal[next].0 <= center {
            state = ordinal[next].1;
            next += 1;
        }
        values.push(state);
    }
    SampledSeries {
        rate,
        t0: 0.0,
        duration,
        values,
    }
}

/// Nearest-frame mapping of an irregular emotion stream onto the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EmotionAlignment {
    /// Source frame index for each grid frame.
    pub index: Vec<usize>,
    /// Grid frames that reuse the source frame of their predecessor.
    pub duplicated: usize,
    /// Source frames never selected.
    pub dropped: usize,
}

pub fn align_emotion_frames(frames: &[EmotionFrame], n: usize, rate: f64) -> Option<EmotionAlignment> {
    if frames.is_empty() {
        return None;
    }
    let mut index = Vec::with_capacity(n);
    let mut j = 0;
    for k in 0..n {
        let center = (k as f64 + 0.5) / rate;
        while j + 1 < frames.len() && (frames[j + 1].t - center).abs() <= (frames[j].t - center).abs() {
            j += 1;
        }
        index.push(j);
    }
    let duplicated = index.windows(2).filter(|w| w[0] == w[1]).count();
    let mut used = vec![false; frames.len()];
    for &i in &index {
        used[i] = true;
    }
    // Frames outside the grid span are not counted as dropped.
    let (lo, hi) = (index.first().copied().unwrap_or(0), index.last().copied().unwrap_or(0));
    let dropped = used[lo..=hi].iter().filter(|u| !**u).count();
    Some(EmotionAlignment {
        index,
        duplicated,
        dropped,
    })
}

/// All streams of one session on a common frame grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedSession {
    pub session_id: String,
    pub rate: f64,
    pub n_frames: usize,
    pub impact: SampledSeries,
    pub self_assessment: Option<SampledSeries>,
    /// `(frame, marker)` for each event of interest.
    pub eoi_markers: Vec<(usize, ImpactValue)>,
    pub emotions: Option<EmotionAlignment>,
}

pub fn align_streams(s: &Session, rate: f64) -> Result<AlignedSession, SessionError> {
    let report = validate_session(s);
    if !report.usable {
        return Err(SessionError::UnusableSession(s.session_id.clone()));
    }
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(SessionError::InvalidParameter(format!("rate {rate}")));
    }
    let impact_stream = s.impact_events.as_ref().expect("usable session has impact events");
    let impact = resample_events(impact_stream, s.duration, rate);
    let n = impact.len();
    let self_assessment = s.self_events.as_ref().map(|e| resample_events(e, s.duration, rate));
    let marker_frame = |t: f64| ((t * rate).floor() as usize).min(n.saturating_sub(1));
    let mut eoi_markers: Vec<(usize, ImpactValue)> = impact_stream
        .markers()
        .chain(s.eoi_events.iter().flat_map(|e| e.markers()))
        .map(|e| (marker_frame(e.t), e.value))
        .collect();
    eoi_markers.sort_by_key(|(k, _)| *k);
    let emotions = s
        .emotion_frames
        .as_deref()
        .and_then(|f| align_emotion_frames(f, n, rate));
    Ok(AlignedSession {
        session_id: s.session_id.clone(),
        rate,
        n_frames: n,
        impact,
        self_assessment,
        eoi_markers,
        emotions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ImpactValue::*;

    #[test]
    fn constant_hold() {
        let e = EventStream::from_pairs(&[(0.0, Positive)]).unwrap();
        let s = resample_events(&e, 1.0, 30.0);
        assert_eq!(s.values, vec![1; 30]);
    }

    #[test]
    fn switch_at_half_second() {
        let e = EventStream::from_pairs(&[(0.0, Positive), (0.5, Negative)]).unwrap();
        let s = resample_events(&e, 1.0, 30.0);
        let mut expected = vec![1i8; 15];
        expected.extend(vec![-1i8; 15]);
        assert_eq!(s.values, expected);
    }

    #[test]
    fn empty_stream_is_neutral() {
        let s = resample_events(&EventStream::default(), 1.0, 30.0);
        assert_eq!(s.values, vec![0; 30]);
    }

    #[test]
    fn markers_do_not_change_state() {
        let e = EventStream::from_pairs(&[(0.1, Positive), (0.4, EoiNegative), (0.7, EoiPositive)]).unwrap();
        let s = resample_events(&e, 1.0, 10.0);
        assert_eq!(s.values, vec![0, 1, 1, 1, 1, 1, 1, 1, 1, 1]);
    }

    #[test]
    fn event_on_frame_center_applies() {
        let e = EventStream::from_pairs(&[(0.25, Negative)]).unwrap();
        let s = resample_events(&e, 1.0, 2.0);
        assert_eq!(s.values, vec![-1, -1]);
    }

    #[test]
    fn frame_counts() {
        assert_eq!(frame_count(1.0, 30.0), 30);
        assert_eq!(frame_count(360.0, 30.0), 10800);
        assert_eq!(frame_count(1.01, 30.0), 31);
        assert_eq!(frame_count(0.1 * 3.0, 10.0), 3);
    }

    #[test]
    fn resample_round_trip_through_events() {
        let e = EventStream::from_pairs(&[(0.2, Negative), (0.33, Positive), (0.9, Neutral)]).unwrap();
        let s = resample_events(&e, 1.3, 30.0);
        let again = resample_events(&s.to_event_stream(), 1.3, 30.0);
        assert_eq!(s, again);
    }

    #[test]
    fn emotion_frames_at_29_79_hz() {
        let frames: Vec<_> = (0..(60.0 * 29.79) as usize)
            .map(|i| EmotionFrame::zeros(i as f64 / 29.79))
            .collect();
        let a = align_emotion_frames(&frames, 1800, 30.0).unwrap();
        assert_eq!(a.index.len(), 1800);
        // every source frame is used, so repeats equal the frame-count deficit
        assert_eq!(a.dropped, 0);
        assert_eq!(a.duplicated, 1800 - frames.len());
        for w in a.index.chunks(150) {
            let reps = w.windows(2).filter(|p| p[0] == p[1]).count();
            assert!(reps <= 2, "{reps} repeats in a 150-frame window");
        }
    }
}
