//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails. Run with `cargo test --test acceptance`; a name
//! fragment as argument runs only the matching checks.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use impact_core::audio_dsp::{audio_feature_vector, extract_features};
use impact_core::cli;
use impact_core::config::{AnalysisConfig, SvmConfig};
use impact_core::emotion_space::{
    cluster_occupancy, emotion_names, emotion_vector, ClusterDefs, EmotionFrame, EmotionMap, NUM_EMOTIONS,
};
use impact_core::impact_metrics::{
    classify_success, estimator_category, impact_score, survey_inhabiter, EstimatorClass, SuccessLabel,
};
use impact_core::predictor::{
    correlation, evaluate_pipeline, loo_cv, read_labels_csv, roc_auc, select_features, train_linear_svm, Dataset,
    FeatureTable, Mode, Row,
};
use impact_core::session_store::{resample_events, AudioTrack, Event, EventStream, ImpactValue, SampledSeries};
use impact_core::stats_report::{chi_square_2x2, ContingencyTable2x2};
use impact_core::synth::audio::{silence, sine, vowel};
use impact_core::synth::corpus::{feature_corpus, CorpusParams};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_time(start: Instant, limit: Duration) -> Result<Duration, String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:.2?}, limit {limit:?}"))?;
    Ok(t)
}

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

fn chi_square_anchor() -> Check {
    let table = ContingencyTable2x2::from_rows([[20, 3], [12, 16]]);
    let start = Instant::now();
    let reps = 1000;
    let mut r = chi_square_2x2(&table).map_err(|e| e.to_string())?;
    for _ in 1..reps {
        r = chi_square_2x2(std::hint::black_box(&table)).map_err(|e| e.to_string())?;
    }
    let per_call = start.elapsed() / reps;
    ensure((r.chi2 - 10.51).abs() <= 0.02, || format!("chi2 = {}", r.chi2))?;
    ensure(r.p < 0.0012, || format!("p = {}", r.p))?;
    ensure(r.n == 51 && r.df == 1, || format!("n = {}, df = {}", r.n, r.df))?;
    ensure(per_call < Duration::from_millis(1), || format!("{per_call:?} per call"))?;
    Ok(format!("chi2 = {:.4}, p = {:.5}, {per_call:.2?} per call", r.chi2, r.p))
}

fn published_coordinates() -> Vec<(String, f64, f64)> {
    let text = fs::read_to_string(data_dir().join("emotion_coordinates.tsv")).unwrap();
    text.lines()
        .skip(1)
        .map(|l| {
            let c: Vec<&str> = l.split('\t').collect();
            (c[0].to_string(), c[1].parse().unwrap(), c[2].parse().unwrap())
        })
        .collect()
}

fn published_clusters() -> BTreeMap<String, BTreeSet<String>> {
    let text = fs::read_to_string(data_dir().join("emotion_clusters.tsv")).unwrap();
    let mut out: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for l in text.lines().skip(1) {
        let (name, members) = l.split_once('\t').unwrap();
        let set = if members.contains(" + ") {
            members.split(" + ").flat_map(|part| out[part.trim()].clone()).collect()
        } else {
            members.split(", ").map(|m| m.trim().to_string()).collect()
        };
        out.insert(name.to_string(), set);
    }
    out
}

fn emotion_map_fidelity() -> Check {
    let start = Instant::now();
    let map = EmotionMap::canonical();
    let published = published_coordinates();
    ensure(published.len() == NUM_EMOTIONS, || format!("{} published rows", published.len()))?;
    for (name, x, y) in &published {
        let f = EmotionFrame::one_hot(0.0, name).map_err(|e| e.to_string())?;
        let v = emotion_vector(&f, &map);
        ensure(v == [*x, *y], || format!("{name}: got {v:?}, published ({x}, {y})"))?;
    }

    let clusters = ClusterDefs::canonical();
    let expected = published_clusters();
    let names: Vec<&str> = clusters.names().collect();
    ensure(
        names.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>() == expected.keys().cloned().collect(),
        || format!("cluster names {names:?}"),
    )?;
    let mut determination = Vec::new();
    for name in emotion_names() {
        let f = EmotionFrame::one_hot(0.0, name).unwrap();
        let occ = cluster_occupancy(&[f], &clusters).map_err(|e| e.to_string())?;
        let got: BTreeSet<String> = occ.iter().filter(|c| c.mass == 1.0).map(|c| c.cluster.clone()).collect();
        ensure(occ.iter().all(|c| c.mass == 0.0 || c.mass == 1.0), || format!("{name}: fractional mass"))?;
        let want: BTreeSet<String> =
            expected.iter().filter(|(_, m)| m.contains(name)).map(|(c, _)| c.clone()).collect();
        ensure(got == want, || format!("{name}: clusters {got:?}, expected {want:?}"))?;
        if name == "Determination" {
            determination = got.into_iter().collect();
        }
    }
    ensure(determination.len() >= 2, || format!("Determination in {determination:?}"))?;
    let t = within_time(start, Duration::from_secs(1))?;
    Ok(format!(
        "48/48 coordinates exact, memberships match; Determination in {} ({t:.1?})",
        determination.join(", ")
    ))
}

fn random_frame(rng: &mut ChaCha8Rng) -> EmotionFrame {
    let mut f = EmotionFrame::zeros(0.0);
    for p in f.p.iter_mut() {
        *p = rng.random();
    }
    f
}

fn emotion_vector_formula() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let map = EmotionMap::canonical();
    let coords: BTreeMap<String, (f64, f64)> =
        published_coordinates().into_iter().map(|(n, x, y)| (n, (x, y))).collect();
    let names: Vec<&str> = emotion_names().collect();
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let f = random_frame(&mut rng);
        let v = emotion_vector(&f, &map);
        let (mut x, mut y) = (0.0, 0.0);
        for (i, name) in names.iter().enumerate() {
            let (cx, cy) = coords[*name];
            x += f.p[i] * cx;
            y += f.p[i] * cy;
        }
        worst = worst.max((v[0] - x).abs()).max((v[1] - y).abs());
    }
    ensure(worst <= 1e-12, || format!("brute-force gap {worst:e}"))?;

    let mut worst_lin: f64 = 0.0;
    for _ in 0..1000 {
        let (f, g) = (random_frame(&mut rng), random_frame(&mut rng));
        let (a, b): (f64, f64) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let mut h = EmotionFrame::zeros(0.0);
        for i in 0..NUM_EMOTIONS {
            h.p[i] = a * f.p[i] + b * g.p[i];
        }
        let (vf, vg, vh) = (emotion_vector(&f, &map), emotion_vector(&g, &map), emotion_vector(&h, &map));
        for k in 0..2 {
            worst_lin = worst_lin.max((vh[k] - (a * vf[k] + b * vg[k])).abs());
        }
    }
    ensure(worst_lin <= 1e-12, || format!("linearity gap {worst_lin:e}"))?;
    Ok(format!("max |brute-force gap| {worst:.1e}, max |linearity gap| {worst_lin:.1e}"))
}

fn random_stream(rng: &mut ChaCha8Rng, duration: f64, rate: f64) -> EventStream {
    let n = rng.random_range(0..40);
    let mut times: Vec<f64> = (0..n)
        .map(|_| {
            if rng.random_bool(0.2) {
                // exactly on a frame center
                (rng.random_range(0..(duration * rate) as usize) as f64 + 0.5) / rate
            } else {
                rng.random_range(0.0..duration)
            }
        })
        .collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let values = [
        ImpactValue::Positive,
        ImpactValue::Neutral,
        ImpactValue::Negative,
        ImpactValue::EoiPositive,
        ImpactValue::EoiNegative,
    ];
    let events = times
        .into_iter()
        .map(|t| Event {
            t,
            value: values[rng.random_range(0..values.len())],
        })
        .collect();
    EventStream::new(events).unwrap()
}

/// State in force at time `t`: the last ordinal event at or before `t`.
fn held_state(e: &EventStream, t: f64) -> i8 {
    let mut state = 0;
    for ev in e.events() {
        if ev.t <= t {
            if let Some(v) = ev.value.valence() {
                state = v;
            }
        }
    }
    state
}

fn resampling_oracle() -> Check {
    let rate = 30.0;
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut samples = 0usize;
    let mut worst_ratio: f64 = 0.0;
    for case in 0..500 {
        let duration = rng.random_range(0.5..60.0);
        let e = random_stream(&mut rng, duration, rate);
        let s = resample_events(&e, duration, rate);
        let n = (duration * rate).ceil() as usize;
        ensure(s.values.len() == n, || format!("case {case}: {} frames, expected {n}", s.values.len()))?;
        for (k, &v) in s.values.iter().enumerate() {
            let want = held_state(&e, (k as f64 + 0.5) / rate);
            ensure(v == want, || format!("case {case} frame {k}: {v} vs oracle {want}"))?;
        }
        samples += n;

        // Exact dwell per state from the event intervals.
        let mut dwell = [0.0f64; 3];
        let mut t0 = 0.0;
        let mut state = 0i8;
        let mut changes = 0usize;
        for ev in e.events() {
            if let Some(v) = ev.value.valence() {
                if v != state {
                    dwell[(state + 1) as usize] += ev.t - t0;
                    t0 = ev.t;
                    state = v;
                    changes += 1;
                }
            }
        }
        dwell[(state + 1) as usize] += duration - t0;
        let score = impact_score(&s).map_err(|e| e.to_string())?;
        let got = [score.negative_s, score.neutral_s, score.positive_s];
        let err = (0..3).map(|i| (got[i] - dwell[i]).abs()).fold(0.0, f64::max);
        let allowed = changes as f64 / rate;
        ensure(err <= allowed + 1e-9, || format!("case {case}: dwell error {err} > {allowed} ({changes} transitions)"))?;
        if changes > 0 {
            worst_ratio = worst_ratio.max(err * rate / changes as f64);
        }
    }
    Ok(format!(
        "{samples} samples match; worst dwell error {:.3} frame per transition",
        worst_ratio
    ))
}

fn dsp_synthesis() -> Check {
    let start = Instant::now();
    let cfg = AnalysisConfig::default();
    let fs = 16_000;

    let tone = AudioTrack::from_f64(&sine(220.0, 0.5, 2.0, fs), fs);
    let v = extract_features(&tone, &cfg).map_err(|e| format!("sine: {e}"))?;
    let get = |name: &str| v.get(name).ok_or_else(|| format!("sine: {name} absent"));
    let f0 = get("f0_mean_hz")?;
    let jitter = get("jitter_local")?;
    let shimmer = get("shimmer_local")?;
    let hnr = get("hnr_mean_db")?;
    ensure((f0 - 220.0).abs() <= 2.0, || format!("F0 {f0}"))?;
    ensure(jitter < 0.005, || format!("jitter {jitter}"))?;
    ensure(shimmer < 0.005, || format!("shimmer {shimmer}"))?;
    ensure(hnr >= 40.0, || format!("HNR {hnr}"))?;

    let vw = AudioTrack::from_f64(&vowel(120.0, &[(700.0, 80.0), (1200.0, 90.0)], 0.5, 2.0, fs), fs);
    let v2 = extract_features(&vw, &cfg).map_err(|e| format!("vowel: {e}"))?;
    let f1 = v2.get("f1_mean_hz").ok_or("vowel: F1 absent")?;
    let f2 = v2.get("f2_mean_hz").ok_or("vowel: F2 absent")?;
    ensure((f1 / 700.0 - 1.0).abs() <= 0.1, || format!("F1 {f1}"))?;
    ensure((f2 / 1200.0 - 1.0).abs() <= 0.1, || format!("F2 {f2}"))?;

    let quiet = audio_feature_vector(&AudioTrack::from_f64(&silence(2.0, fs), fs), &cfg);
    ensure(!quiet.usable, || "silence marked usable".into())?;
    ensure(quiet.values.iter().all(Option::is_none), || "silence has present values".into())?;
    ensure(quiet.reason.is_some(), || "silence without a reason".into())?;

    let t = within_time(start, Duration::from_secs(30))?;
    Ok(format!(
        "F0 {f0:.2} Hz, jitter {:.3}%, shimmer {:.3}%, HNR {hnr:.1} dB; F1 {f1:.0} Hz, F2 {f2:.0} Hz; silence unusable ({t:.1?})",
        jitter * 100.0,
        shimmer * 100.0
    ))
}

/// Standardizes columns with the population sd (constant columns keep sd 1).
fn standardize(x: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = x.len() as f64;
    let p = x[0].len();
    let mut out = x.to_vec();
    for j in 0..p {
        let m = x.iter().map(|r| r[j]).sum::<f64>() / n;
        let sd = (x.iter().map(|r| (r[j] - m).powi(2)).sum::<f64>() / n).sqrt();
        let sd = if sd > 0.0 { sd } else { 1.0 };
        for r in out.iter_mut() {
            r[j] = (r[j] - m) / sd;
        }
    }
    out
}

/// Exact soft-margin SVM by enumerating which points sit on the margin,
/// violate it, or clear it, and solving the KKT system of each assignment.
/// Returns (w, b). When no point sits on the margin, b is the midpoint of
/// its feasible interval.
fn svm_oracle(x: &[Vec<f64>], y: &[f64], c: f64) -> Option<(Vec<f64>, f64)> {
    let n = x.len();
    let p = x[0].len();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| u * v).sum::<f64>();
    let tol = 1e-9;
    let mut best: Option<(f64, Vec<f64>, f64)> = None;
    for code in 0..3usize.pow(n as u32) {
        // 0 = clears the margin (alpha 0), 1 = on it, 2 = violates (alpha C)
        let mut kind = vec![0u8; n];
        let mut k = code;
        for slot in kind.iter_mut() {
            *slot = (k % 3) as u8;
            k /= 3;
        }
        let margin: Vec<usize> = (0..n).filter(|&i| kind[i] == 1).collect();
        let m = margin.len();
        let mut w0 = vec![0.0; p];
        let mut sum_y = 0.0;
        for i in (0..n).filter(|&i| kind[i] == 2) {
            for j in 0..p {
                w0[j] += c * y[i] * x[i][j];
            }
            sum_y += c * y[i];
        }
        let (alpha_m, b) = if m == 0 {
            if sum_y.abs() > tol {
                continue;
            }
            // y_i (w.x_i + b) <= 1 for violators, >= 1 for the rest
            let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
            for i in 0..n {
                let bound = y[i] - dot(&w0, &x[i]);
                let (upper, pos) = (kind[i] == 2, y[i] > 0.0);
                if upper == pos {
                    hi = hi.min(bound);
                } else {
                    lo = lo.max(bound);
                }
            }
            if lo > hi + tol || !lo.is_finite() || !hi.is_finite() {
                continue;
            }
            (Vec::new(), 0.5 * (lo + hi))
        } else {
            let mut a = DMatrix::<f64>::zeros(m + 1, m + 1);
            let mut rhs = DVector::<f64>::zeros(m + 1);
            for (r, &i) in margin.iter().enumerate() {
                for (s, &k) in margin.iter().enumerate() {
                    a[(r, s)] = y[i] * y[k] * dot(&x[i], &x[k]);
                }
                a[(r, m)] = y[i];
                rhs[r] = 1.0 - y[i] * dot(&w0, &x[i]);
                a[(m, r)] = y[i];
            }
            rhs[m] = -sum_y;
            let lu = a.clone().lu();
            let Some(sol) = lu.solve(&rhs) else { continue };
            if (&a * &sol - &rhs).norm() > 1e-8 {
                continue;
            }
            let alpha: Vec<f64> = sol.iter().take(m).copied().collect();
            if alpha.iter().any(|&al| al < -tol || al > c + tol) {
                continue;
            }
            (alpha, sol[m])
        };
        let mut w = w0.clone();
        for (r, &i) in margin.iter().enumerate() {
            for j in 0..p {
                w[j] += alpha_m[r] * y[i] * x[i][j];
            }
        }
        let feasible = (0..n).all(|i| {
            let f = y[i] * (dot(&w, &x[i]) + b);
            match kind[i] {
                0 => f >= 1.0 - 1e-7,
                1 => (f - 1.0).abs() <= 1e-7,
                _ => f <= 1.0 + 1e-7,
            }
        });
        if !feasible {
            continue;
        }
        let hinge: f64 = (0..n).map(|i| (1.0 - y[i] * (dot(&w, &x[i]) + b)).max(0.0)).sum();
        let obj = 0.5 * dot(&w, &w) + c * hinge;
        if best.as_ref().is_none_or(|(o, _, _)| obj < *o - 1e-12) {
            best = Some((obj, w, b));
        }
    }
    best.map(|(_, w, b)| (w, b))
}

fn svm_equivalence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let cfg = SvmConfig::default();
    let mut worst: f64 = 0.0;
    for case in 0..20 {
        let n = rng.random_range(4..=8);
        let p = rng.random_range(2..=3);
        let mut labels: Vec<bool> = (0..n).map(|i| i % 2 == 0).collect();
        labels.shuffle(&mut rng);
        let shift: f64 = rng.random_range(0.0..2.0);
        let x: Vec<Vec<f64>> = labels
            .iter()
            .map(|&l| {
                (0..p)
                    .map(|_| rng.random_range(-1.0..1.0) + if l { shift } else { 0.0 })
                    .collect()
            })
            .collect();
        let rows = x
            .iter()
            .zip(&labels)
            .enumerate()
            .map(|(i, (r, &l))| Row {
                session_id: format!("r{i}"),
                x: r.clone(),
                y: SuccessLabel::from_bool(l),
            })
            .collect();
        let d = Dataset::new((0..p).map(|j| format!("x{j}")).collect(), rows).map_err(|e| e.to_string())?;
        let model = train_linear_svm(&d, &cfg).map_err(|e| format!("case {case}: {e}"))?;

        let z = standardize(&x);
        let y: Vec<f64> = labels.iter().map(|&l| if l { 1.0 } else { -1.0 }).collect();
        let (w, b) = svm_oracle(&z, &y, cfg.c).ok_or_else(|| format!("case {case}: oracle found no solution"))?;
        for (i, row) in x.iter().enumerate() {
            let ours = model.decision(row);
            let theirs: f64 = w.iter().zip(&z[i]).map(|(a, b)| a * b).sum::<f64>() + b;
            let gap = (ours - theirs).abs();
            ensure(gap <= 1e-4, || format!("case {case} row {i}: decision {ours} vs oracle {theirs}"))?;
            worst = worst.max(gap);
        }
    }

    // Two well separated clusters.
    let spread = 0.5;
    let rows: Vec<Row> = (0..30)
        .map(|i| {
            let pos = i % 2 == 0;
            let centre = if pos { 10.0 * spread } else { 0.0 };
            Row {
                session_id: format!("s{i}"),
                x: (0..3).map(|_| centre + rng.random_range(-spread / 2.0..spread / 2.0)).collect(),
                y: SuccessLabel::from_bool(pos),
            }
        })
        .collect();
    let d = Dataset::new(vec!["a".into(), "b".into(), "c".into()], rows).unwrap();
    let cv = loo_cv(&d, &cfg).map_err(|e| e.to_string())?;
    ensure(cv.accuracy == 1.0 && cv.skipped.is_empty(), || {
        format!("separable LOO accuracy {}", cv.accuracy)
    })?;

    for case in 0..200 {
        let n = rng.random_range(2..60);
        let mut labels: Vec<SuccessLabel> = (0..n).map(|_| SuccessLabel::from_bool(rng.random_bool(0.5))).collect();
        labels[0] = SuccessLabel::Successful;
        labels[1] = SuccessLabel::Unsuccessful;
        // coarse scores so ties occur
        let scores: Vec<f64> = (0..n).map(|_| (rng.random_range(-3.0..3.0f64) * 4.0).round() / 4.0).collect();
        let auc = roc_auc(&scores, &labels).map_err(|e| e.to_string())?.auc;
        let pos = labels.iter().filter(|l| l.is_success()).count() as u64;
        let neg = n as u64 - pos;
        let mut twice_wins = 0u64;
        for i in (0..n).filter(|&i| labels[i].is_success()) {
            for j in (0..n).filter(|&j| !labels[j].is_success()) {
                twice_wins += match scores[i].partial_cmp(&scores[j]).unwrap() {
                    std::cmp::Ordering::Greater => 2,
                    std::cmp::Ordering::Equal => 1,
                    std::cmp::Ordering::Less => 0,
                };
            }
        }
        let mw = twice_wins as f64 / (2 * pos * neg) as f64;
        ensure(auc == mw, || format!("set {case}: AUC {auc} vs Mann-Whitney {mw}"))?;
    }
    Ok(format!(
        "20/20 datasets within {worst:.1e} of the exact solution; separable LOO accuracy 1.0; 200/200 AUC == Mann-Whitney"
    ))
}

fn feature_selection() -> Check {
    let start = Instant::now();
    let corpus = feature_corpus(&CorpusParams::default(), 0);
    let (d, dropped) = Dataset::from_table(&corpus.table, &corpus.labels);
    ensure(dropped.absent_features.is_empty() && d.n_features() == 53, || "corpus incomplete".into())?;
    let sel = select_features(&d, &SvmConfig::default()).map_err(|e| e.to_string())?;
    let n = sel.selected.len();
    ensure(n <= 20, || format!("{n} selected"))?;
    let cols: Vec<Vec<f64>> = sel
        .selected
        .iter()
        .map(|name| d.column(d.feature_names.iter().position(|f| f == name).unwrap()))
        .collect();
    let mut max_corr: f64 = 0.0;
    for a in 0..cols.len() {
        for b in a + 1..cols.len() {
            max_corr = max_corr.max(correlation(&cols[a], &cols[b]).abs());
        }
    }
    ensure(max_corr <= 0.9, || format!("max pairwise |corr| {max_corr}"))?;
    ensure(n == 17, || format!("{n} survivors, pruned {:?}", sel.pruned))?;
    let t = within_time(start, Duration::from_secs(10))?;
    Ok(format!("53 -> top 20 -> {n}; max pairwise |corr| {max_corr:.3}; {} pruned ({t:.1?})", sel.pruned.len()))
}

fn evaluation_auc(path: &Path, mode: &str) -> Result<f64, String> {
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(path).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    v["evaluation"]["modes"]
        .as_array()
        .and_then(|ms| ms.iter().find(|m| m["mode"] == mode))
        .and_then(|m| m["auc"].as_f64())
        .ok_or_else(|| format!("no AUC for {mode}"))
}

fn end_to_end_cohort() -> Check {
    let start = Instant::now();
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let root = tmp.path().join("cohort");
    cli::cmd_synth_cohort(&root, 51, 1.0, 4.0, 7).map_err(|e| e.to_string())?;
    let cfg = AnalysisConfig::default();
    let features = tmp.path().join("features.csv");
    let labels = tmp.path().join("labels.csv");
    cli::cmd_features(&root, &cfg, Mode::AudioOnly, &features, Some(&labels)).map_err(|e| e.to_string())?;

    let label_map = read_labels_csv(fs::File::open(&labels).unwrap()).map_err(|e| e.to_string())?;
    let positives = label_map.values().filter(|l| l.is_success()).count();
    ensure(label_map.len() == 204 && positives == 130, || {
        format!("{} sessions, {positives} positive", label_map.len())
    })?;

    let eval = tmp.path().join("evaluation.json");
    cli::cmd_evaluate(&features, &labels, &cfg, &[Mode::AudioOnly, Mode::TopSelected], &eval, None)
        .map_err(|e| e.to_string())?;
    let auc = evaluation_auc(&eval, "audio_only")?;
    let auc_top = evaluation_auc(&eval, "top_selected")?;
    ensure(auc >= 0.95, || format!("strong-signal LOO AUC {auc}"))?;

    // Label-shuffled controls through the same audio-only evaluation.
    let table = FeatureTable::read_csv(fs::File::open(&features).unwrap()).map_err(|e| e.to_string())?;
    let ids: Vec<String> = label_map.keys().cloned().collect();
    let values: Vec<SuccessLabel> = label_map.values().copied().collect();
    let mut shuffled_aucs = Vec::new();
    for k in 0..10u64 {
        let mut v = values.clone();
        v.shuffle(&mut ChaCha8Rng::seed_from_u64(1000 + k));
        let m: BTreeMap<String, SuccessLabel> = ids.iter().cloned().zip(v).collect();
        let (r, _) = evaluate_pipeline(&table, &m, &[Mode::AudioOnly], &cfg.svm);
        shuffled_aucs.push(r.modes[0].auc.ok_or("shuffled run produced no AUC")?);
    }
    let mean = shuffled_aucs.iter().sum::<f64>() / shuffled_aucs.len() as f64;
    ensure((mean - 0.5).abs() <= 0.05, || format!("shuffled mean AUC {mean:.3} ({shuffled_aucs:?})"))?;
    let t = within_time(start, Duration::from_secs(300))?;
    Ok(format!(
        "204 sessions, 130 positive; LOO AUC {auc:.3} (top-selected {auc_top:.3}); shuffled mean {mean:.3} over 10 ({t:.0?})"
    ))
}

fn metrics_suite() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for case in 0..1000 {
        let rate = [10.0, 25.0, 30.0][case % 3];
        let n = rng.random_range(1..400);
        let values: Vec<i8> = (0..n).map(|_| rng.random_range(-1..=1)).collect();
        let mut s = SampledSeries::new(rate, values);
        // partial last frame
        s.duration -= rng.random_range(0.0..1.0 / rate);
        let sc = impact_score(&s).map_err(|e| e.to_string())?;
        ensure(sc.value == sc.positive_s - sc.negative_s, || format!("series {case}: value identity"))?;
        ensure(sc.value.abs() <= s.duration + 1e-12, || format!("series {case}: |value| > duration"))?;
        let total = sc.positive_s + sc.neutral_s + sc.negative_s;
        ensure((total - s.duration).abs() <= 1e-9, || format!("series {case}: dwell sum {total}"))?;
    }

    let cases = [
        (7.0, 6.0, EstimatorClass::Accurate),
        (8.0, 5.0, EstimatorClass::OverEstimator),
        (3.0, 2.0, EstimatorClass::Excluded),
        (5.0, 9.0, EstimatorClass::Excluded),
    ];
    for (own, theirs, want) in cases {
        let inhabiter = survey_inhabiter(theirs, theirs).unwrap();
        let got = estimator_category(own, inhabiter).map_err(|e| e.to_string())?;
        ensure(got == want, || format!("({own}, {theirs}) -> {got:?}, expected {want:?}"))?;
    }

    let label = |a: f64, b: f64| classify_success(survey_inhabiter(a, b).unwrap());
    ensure(label(7.0, 7.0) == SuccessLabel::Successful, || "7 not successful".into())?;
    ensure(label(6.0, 8.0) == SuccessLabel::Successful, || "mean 7 not successful".into())?;
    ensure(label(6.0, 7.0) == SuccessLabel::Unsuccessful, || "6.5 successful".into())?;
    Ok("1000 series satisfy the signed-seconds identities; 4/4 estimator examples; threshold inclusive at 7".into())
}

fn tree_bytes(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for e in fs::read_dir(&dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(root).unwrap().display().to_string();
                out.insert(rel, fs::read(&p).unwrap());
            }
        }
    }
    out
}

fn run_cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_impact"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("impact {}: {}", args.join(" "), String::from_utf8_lossy(&out.stderr)));
    }
    Ok(out.stdout)
}

fn determinism() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p = |name: &str| tmp.path().join(name).display().to_string();
    let mut checked = Vec::new();

    // synth: two generations from the same seed
    for run in ["a", "b"] {
        run_cli(&["--seed", "3", "synth", "cohort", &p(&format!("corpus_{run}")), "--participants", "4", "--duration", "2"])?;
        run_cli(&["--seed", "3", "synth", "features", "-o", &p(&format!("synth_{run}.csv")), "--labels-out", &p(&format!("synth_labels_{run}.csv"))])?;
    }
    ensure(tree_bytes(&tmp.path().join("corpus_a")) == tree_bytes(&tmp.path().join("corpus_b")), || {
        "synth cohort differs".into()
    })?;
    for f in ["synth_{}.csv", "synth_labels_{}.csv"] {
        let a = fs::read(p(&f.replace("{}", "a"))).unwrap();
        ensure(a == fs::read(p(&f.replace("{}", "b"))).unwrap(), || format!("{f} differs"))?;
    }
    checked.push("synth");

    let corpus = p("corpus_a");
    let mut outputs: BTreeMap<&str, [Vec<u8>; 2]> = BTreeMap::new();
    for (i, run) in ["1", "2"].iter().enumerate() {
        let o = |name: &str| p(&format!("{name}_{run}"));
        let mut put = |key: &'static str, bytes: Vec<u8>| {
            outputs.entry(key).or_default()[i] = bytes;
        };
        put("ingest", run_cli(&["ingest", &corpus])?);
        put("validate", run_cli(&["validate", &corpus])?);
        for mode in ["full", "audio_only", "video_only"] {
            let f = o(&format!("features_{mode}.csv"));
            run_cli(&["features", &corpus, "--mode", mode, "-o", &f, "--labels-out", &o("labels.csv")])?;
            put(
                match mode {
                    "full" => "features full",
                    "audio_only" => "features audio_only",
                    _ => "features video_only",
                },
                [fs::read(&f).unwrap(), fs::read(format!("{f}.meta.json")).unwrap()].concat(),
            );
        }
        put("labels", fs::read(o("labels.csv")).unwrap());
        let full = o("features_full.csv");
        run_cli(&["train", "--features", &full, "--labels", &o("labels.csv"), "-o", &o("model.json")])?;
        put("train", fs::read(o("model.json")).unwrap());
        run_cli(&["evaluate", "--features", &full, "--labels", &o("labels.csv"), "-o", &o("eval.json")])?;
        put("evaluate", fs::read(o("eval.json")).unwrap());
        run_cli(&["report", &corpus, "-o", &o("report"), "--evaluation", &o("eval.json")])?;
        let rep: Vec<u8> = tree_bytes(Path::new(&o("report")))
            .into_iter()
            .flat_map(|(k, v)| [k.into_bytes(), v].concat())
            .collect();
        put("report", rep);
    }
    for (name, [a, b]) in &outputs {
        ensure(!a.is_empty(), || format!("{name}: empty output"))?;
        ensure(a == b, || format!("{name}: outputs differ between runs"))?;
        checked.push(name);
    }

    // merge-annotations on two identical copies, and again on the same copy
    let annotation = p("self.jsonl");
    fs::write(&annotation, "{\"t\":0.0,\"v\":\"positive\"}\n{\"t\":1.25,\"v\":\"negative\"}\n").unwrap();
    for run in ["m1", "m2"] {
        run_cli(&["--seed", "3", "synth", "cohort", &p(run), "--participants", "1", "--duration", "2"])?;
        run_cli(&["merge-annotations", &p(run), "--session", "p000-s1", "--self", &annotation])?;
    }
    let once = tree_bytes(&tmp.path().join("m1"));
    ensure(once == tree_bytes(&tmp.path().join("m2")), || "merge-annotations differs".into())?;
    run_cli(&["merge-annotations", &p("m1"), "--session", "p000-s1", "--self", &annotation])?;
    ensure(once == tree_bytes(&tmp.path().join("m1")), || "merge-annotations not idempotent".into())?;
    checked.push("merge-annotations");
    Ok(format!("byte-identical reruns: {}", checked.join(", ")))
}

fn main() {
    let filter: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let checks: [(&str, fn() -> Check); 10] = [
        ("chi-square anchor", chi_square_anchor),
        ("emotion-map fidelity", emotion_map_fidelity),
        ("emotion-vector formula", emotion_vector_formula),
        ("resampling oracle", resampling_oracle),
        ("DSP synthesis suite", dsp_synthesis),
        ("SVM oracle equivalence", svm_equivalence),
        ("feature-selection arithmetic", feature_selection),
        ("end-to-end synthetic cohort", end_to_end_cohort),
        ("metrics suite", metrics_suite),
        ("CLI determinism", determinism),
    ];
    let mut failed = 0;
    let mut ran = 0;
    for (name, check) in checks {
        if filter.as_deref().is_some_and(|f| !name.contains(f)) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS  {name} [{secs:.2}s]: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name} [{secs:.2}s]: {why}");
            }
        }
    }
    println!("acceptance: {}/{ran} passed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
