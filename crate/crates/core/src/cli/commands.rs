use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::audio_dsp::registry::{feature_names, REGISTRY_VERSION};
use crate::audio_dsp::audio_feature_vector;
use crate::config::AnalysisConfig;
use crate::emotion_space::{session_trajectory, video_features, ClusterDefs, EmotionMap, CATALOG_VERSION, VIDEO_FEATURES};
use crate::impact_metrics::{classify_success, session_metrics, survey_inhabiter, SuccessLabel};
use crate::predictor::{
    evaluate_pipeline, mode_columns, read_labels_csv, select_features, train_linear_svm, write_labels_csv,
    Dataset, FeatureTable, Mode, RocCurve,
};
use crate::session_store::{merge_self_assessment, write_bundle, ValidationReport};
use crate::stats_report::{emit_report, ReportInputs};
use crate::synth;

use super::corpus::load_corpus;
use super::CliError;

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn to_json<T: Serialize>(v: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("output serializes");
    s.push('\n');
    s.into_bytes()
}

/// Writes to `out`, or stdout when absent.
fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(p) => write_file(p, bytes),
        None => {
            let mut o = std::io::stdout().lock();
            o.write_all(bytes).and_then(|_| o.flush()).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn cmd_ingest(root: &Path, cfg: &AnalysisConfig, out: Option<&Path>) -> Result<(), CliError> {
    let corpus = load_corpus(root, cfg)?;
    emit(out, &to_json(&corpus.index))
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationSummary {
    pub config: AnalysisConfig,
    pub total: usize,
    pub usable: usize,
    pub unusable: usize,
    pub unusable_sessions: Vec<String>,
    /// Bundles that could not be read at all, with the reason.
    pub unreadable: BTreeMap<String, String>,
    pub reports: Vec<ValidationReport>,
}

pub fn cmd_validate(root: &Path, cfg: &AnalysisConfig, out: Option<&Path>) -> Result<ValidationSummary, CliError> {
    let corpus = load_corpus(root, cfg)?;
    let entries = &corpus.index.sessions;
    let summary = ValidationSummary {
        config: cfg.clone(),
        total: entries.len(),
        usable: entries.iter().filter(|e| e.usable).count(),
        unusable: entries.iter().filter(|e| !e.usable).count(),
        unusable_sessions: entries.iter().filter(|e| !e.usable).map(|e| e.session_id.clone()).collect(),
        unreadable: entries
            .iter()
            .filter(|e| !corpus.reports.contains_key(&e.session_id))
            .map(|e| (e.session_id.clone(), e.reasons.join("; ")))
            .collect(),
        reports: corpus.reports.values().cloned().collect(),
    };
    emit(out, &to_json(&summary))?;
    Ok(summary)
}

fn emotion_assets(cfg: &AnalysisConfig) -> Result<(EmotionMap, ClusterDefs), CliError> {
    let map = match &cfg.emotion.map_csv {
        Some(p) => {
            let f = fs::File::open(p).map_err(|e| CliError::io(Path::new(p), e))?;
            EmotionMap::from_csv(f).map_err(|e| CliError::Usage(format!("{p}: {e}")))?
        }
        None => EmotionMap::canonical(),
    };
    let clusters = match &cfg.emotion.clusters_json {
        Some(p) => {
            let f = fs::File::open(p).map_err(|e| CliError::io(Path::new(p), e))?;
            ClusterDefs::from_json(f).map_err(|e| CliError::Usage(format!("{p}: {e}")))?
        }
        None => ClusterDefs::canonical(),
    };
    Ok((map, clusters))
}

fn success_of(s: &crate::session_store::Session) -> Option<SuccessLabel> {
    let sv = s.survey.as_ref()?;
    survey_inhabiter(sv.survey_i_item1, sv.survey_i_item2).ok().map(classify_success)
}

#[derive(Debug, Clone, Serialize)]
struct FeaturesMeta<'a> {
    config: &'a AnalysisConfig,
    mode: Mode,
    registry_version: &'static str,
    catalog_version: &'static str,
    rows: usize,
    excluded_sessions: Vec<(String, String)>,
}

/// Feature table of every usable session, plus a `<out>.meta.json` sidecar
/// echoing the configuration.
pub fn cmd_features(
    root: &Path,
    cfg: &AnalysisConfig,
    mode: Mode,
    out: &Path,
    labels_out: Option<&Path>,
) -> Result<(), CliError> {
    if mode == Mode::TopSelected {
        return Err(CliError::Usage("top_selected is chosen during evaluation, not extraction".into()));
    }
    let (map, clusters) = emotion_assets(cfg)?;
    let corpus = load_corpus(root, cfg)?;
    let sessions: Vec<_> = corpus.usable().collect();
    let want_audio = mode != Mode::VideoOnly;
    let want_video = mode != Mode::AudioOnly;

    let rows: Vec<Vec<Option<f64>>> = sessions
        .par_iter()
        .map(|s| {
            let mut v = Vec::new();
            if want_audio {
                let audio = s.participant_audio.as_ref().expect("usable sessions carry audio");
                let fv = audio_feature_vector(audio, cfg);
                if let Some(r) = &fv.reason {
                    log::warn!("{}: {r}", s.session_id);
                }
                v.extend(fv.values);
            }
            if want_video {
                let frames = s.emotion_frames.as_deref().unwrap_or_default();
                v.extend(video_features(frames, &map, &clusters, cfg.emotion.k_sigma));
            }
            v
        })
        .collect();

    let mut names: Vec<String> = Vec::new();
    if want_audio {
        names.extend(feature_names().into_iter().map(String::from));
    }
    if want_video {
        names.extend(VIDEO_FEATURES.iter().map(|s| s.to_string()));
    }
    let mut table = FeatureTable::new(names);
    for (s, v) in sessions.iter().zip(rows) {
        table.push(&s.session_id, v)?;
    }
    let mut buf = Vec::new();
    table.write_csv(&mut buf)?;
    write_file(out, &buf)?;

    let meta = FeaturesMeta {
        config: cfg,
        mode,
        registry_version: REGISTRY_VERSION,
        catalog_version: CATALOG_VERSION,
        rows: table.rows.len(),
        excluded_sessions: corpus.excluded(),
    };
    let mut meta_path = out.as_os_str().to_owned();
    meta_path.push(".meta.json");
    write_file(Path::new(&meta_path), &to_json(&meta))?;

    if let Some(lp) = labels_out {
        let labels: Vec<(String, SuccessLabel)> = sessions
            .iter()
            .filter_map(|s| success_of(s).map(|l| (s.session_id.clone(), l)))
            .collect();
        let mut buf = Vec::new();
        write_labels_csv(&mut buf, &labels)?;
        write_file(lp, &buf)?;
    }
    Ok(())
}

fn read_inputs(features: &Path, labels: &Path) -> Result<(FeatureTable, BTreeMap<String, SuccessLabel>), CliError> {
    let f = fs::File::open(features).map_err(|e| CliError::io(features, e))?;
    let table = FeatureTable::read_csv(f)?;
    let l = fs::File::open(labels).map_err(|e| CliError::io(labels, e))?;
    Ok((table, read_labels_csv(l)?))
}

#[derive(Debug, Serialize)]
struct TrainOutput<'a> {
    config: &'a AnalysisConfig,
    mode: Mode,
    n_rows: usize,
    dropped: crate::predictor::Dropped,
    model: crate::predictor::SvmModel,
}

pub fn cmd_train(
    features: &Path,
    labels: &Path,
    cfg: &AnalysisConfig,
    mode: Mode,
    out: &Path,
) -> Result<(), CliError> {
    let (table, labels) = read_inputs(features, labels)?;
    let cols = mode_columns(&table, mode);
    if cols.is_empty() {
        return Err(CliError::Validation(format!("no feature columns for mode {mode}")));
    }
    let (data, dropped) = Dataset::from_table(&table.select(&cols)?, &labels);
    let data = if mode == Mode::TopSelected {
        let subset = select_features(&data, &cfg.svm)?;
        let names: Vec<&str> = subset.selected.iter().map(String::as_str).collect();
        data.select(&names)?
    } else {
        data
    };
    let model = train_linear_svm(&data, &cfg.svm)?;
    write_file(
        out,
        &to_json(&TrainOutput {
            config: cfg,
            mode,
            n_rows: data.len(),
            dropped,
            model,
        }),
    )
}

#[derive(Debug, Serialize)]
struct EvaluateOutput<'a> {
    config: &'a AnalysisConfig,
    evaluation: crate::predictor::EvaluationReport,
}

pub fn cmd_evaluate(
    features: &Path,
    labels: &Path,
    cfg: &AnalysisConfig,
    modes: &[Mode],
    out: &Path,
    timing_out: Option<&Path>,
) -> Result<(), CliError> {
    let (table, labels) = read_inputs(features, labels)?;
    let (evaluation, timings) = evaluate_pipeline(&table, &labels, modes, &cfg.svm);
    for m in &evaluation.modes {
        if let Some(e) = &m.error {
            log::warn!("mode {}: {e}", m.mode);
        }
    }
    write_file(out, &to_json(&EvaluateOutput { config: cfg, evaluation }))?;
    if let Some(t) = timing_out {
        write_file(t, &to_json(&timings))?;
    }
    Ok(())
}

/// ROC curves from an evaluation file written by `evaluate`.
fn read_rocs(path: &Path) -> Result<Vec<(String, RocCurve)>, CliError> {
    let v: serde_json::Value =
        serde_json::from_str(&read_text(path)?).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for m in v["evaluation"]["modes"].as_array().into_iter().flatten() {
        let (Some(mode), Some(roc)) = (m["mode"].as_str(), m.get("roc").filter(|r| !r.is_null())) else {
            continue;
        };
        let roc: RocCurve = serde_json::from_value(roc.clone())
            .map_err(|e| CliError::Validation(format!("{}: mode {mode}: {e}", path.display())))?;
        out.push((mode.to_string(), roc));
    }
    Ok(out)
}

/// Writes the report directory. An empty cohort still writes every file and
/// then fails with a validation exit code.
pub fn cmd_report(root: &Path, cfg: &AnalysisConfig, out: &Path, evaluation: Option<&Path>) -> Result<(), CliError> {
    let (map, _) = emotion_assets(cfg)?;
    let corpus = load_corpus(root, cfg)?;
    let mut excluded = corpus.excluded();
    let mut metrics = Vec::new();
    let mut trajectories = Vec::new();
    for s in corpus.usable() {
        match session_metrics(s, cfg.align.rate_hz) {
            Ok(m) => metrics.push(m),
            Err(e) => excluded.push((s.session_id.clone(), e.to_string())),
        }
        if let Some(frames) = &s.emotion_frames {
            if let Ok(tr) = session_trajectory(frames, &map) {
                trajectories.push((s.session_id.clone(), tr));
            }
        }
    }
    excluded.sort();
    let rocs = match evaluation {
        Some(p) => read_rocs(p)?,
        None => Vec::new(),
    };
    let inputs = ReportInputs {
        config: serde_json::to_value(cfg).expect("config serializes"),
        metrics: &metrics,
        excluded,
        trajectories,
        k_sigma: cfg.emotion.k_sigma,
        rocs,
    };
    let report = emit_report(out, &inputs)?;
    if report.is_empty() {
        return Err(CliError::Validation("no usable sessions: report sections are empty".into()));
    }
    Ok(())
}

/// Validates `self_file` against the event-stream schema and the session's
/// duration, then stores it as the bundle's `self.jsonl`. Nothing is written
/// on failure.
pub fn cmd_merge_annotations(
    root: &Path,
    cfg: &AnalysisConfig,
    session: &str,
    self_file: &Path,
) -> Result<usize, CliError> {
    let corpus = load_corpus(root, cfg)?;
    let entry = corpus
        .index
        .sessions
        .iter()
        .find(|e| e.session_id == session)
        .ok_or_else(|| CliError::Usage(format!("no session `{session}` under {}", root.display())))?;
    let text = read_text(self_file)?;
    let stream = merge_self_assessment(root.join(&entry.path), &text)?;
    Ok(stream.len())
}

pub fn cmd_synth_cohort(out: &Path, participants: usize, signal: f64, duration: f64, seed: u64) -> Result<(), CliError> {
    if participants == 0 || !(duration > 0.5) || !(0.0..=1.0).contains(&signal) {
        return Err(CliError::Usage(
            "need participants >= 1, duration > 0.5 s and signal in [0, 1]".into(),
        ));
    }
    let base = synth::cohort::CohortParams::default();
    let scale = |k: usize| (k * participants + base.n_participants / 2) / base.n_participants;
    let params = synth::cohort::CohortParams {
        n_participants: participants,
        s1_successful: scale(base.s1_successful),
        cross_down: scale(base.cross_down),
        cross_up: scale(base.cross_up),
        s2_successful: scale(base.s2_successful),
        s3_successful: scale(base.s3_successful),
        signal,
        duration_s: duration,
        ..base
    };
    let sessions = synth::cohort::cohort(&params, seed);
    sessions
        .par_iter()
        .try_for_each(|s| write_bundle(s, out.join(&s.session_id)).map(|_| ()))?;
    Ok(())
}

pub fn cmd_synth_features(out: &Path, labels_out: &Path, seed: u64) -> Result<(), CliError> {
    let c = synth::corpus::feature_corpus(&synth::corpus::CorpusParams::default(), seed);
    let mut buf = Vec::new();
    c.table.write_csv(&mut buf)?;
    write_file(out, &buf)?;
    let labels: Vec<(String, SuccessLabel)> = c.labels.into_iter().collect();
    let mut buf = Vec::new();
    write_labels_csv(&mut buf, &labels)?;
    write_file(labels_out, &buf)
}
