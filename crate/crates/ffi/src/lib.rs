//! C ABI over `impact-core`.
//!
//! Objects cross the boundary as opaque handles created by `*_open`/`*_new`
//! functions and released with the matching `*_free`. Every fallible call
//! returns an [`ImpactStatus`]; on failure a message is available from
//! [`impact_last_error`] on the same thread. Output pointers are written only
//! on success.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::sync::OnceLock;

use impact_core::audio_dsp::{self, registry};
use impact_core::config::AnalysisConfig;
use impact_core::emotion_space::{emotion_vector, EmotionFrame, EmotionMap, NUM_EMOTIONS};
use impact_core::impact_metrics::{self, SuccessLabel};
use impact_core::predictor::{self, Dataset, Row, SvmModel};
use impact_core::session_store::{self, Session};
use impact_core::stats_report::{self, ContingencyTable2x2};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImpactStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Io = 4,
    Validation = 5,
    Compute = 6,
    Panic = 7,
}

/// Number of entries in the audio feature vector.
pub const IMPACT_AUDIO_FEATURES: usize = 53;
/// Number of emotion probabilities per frame.
pub const IMPACT_NUM_EMOTIONS: usize = 48;

const _: () = assert!(IMPACT_AUDIO_FEATURES == registry::FEATURES.len() && IMPACT_NUM_EMOTIONS == NUM_EMOTIONS);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let c = CString::new(msg.into().replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: ImpactStatus, msg: impl Into<String>) -> ImpactStatus {
    set_error(msg);
    status
}

/// Runs `f`, turning panics into [`ImpactStatus::Panic`].
fn guard(f: impl FnOnce() -> ImpactStatus) -> ImpactStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| p.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "panic".into());
        fail(ImpactStatus::Panic, msg)
    })
}

unsafe fn path_arg<'a>(p: *const c_char) -> Result<&'a str, ImpactStatus> {
    if p.is_null() {
        return Err(fail(ImpactStatus::NullPointer, "path is null"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(ImpactStatus::InvalidUtf8, "path is not UTF-8"))
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(ImpactStatus::NullPointer, concat!(stringify!($p), " is null"));
        })+
    };
}

fn session_status(e: &session_store::SessionError) -> ImpactStatus {
    match e {
        session_store::SessionError::Io { .. } | session_store::SessionError::MissingManifest(_) => ImpactStatus::Io,
        _ => ImpactStatus::Validation,
    }
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn impact_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version, static.
#[no_mangle]
pub extern "C" fn impact_version() -> *const c_char {
    static V: OnceLock<CString> = OnceLock::new();
    V.get_or_init(|| CString::new(env!("CARGO_PKG_VERSION")).unwrap()).as_ptr()
}

// ---- configuration ----

/// Analysis configuration. Functions taking one accept null for defaults.
pub struct ImpactConfig {
    inner: AnalysisConfig,
}

#[no_mangle]
pub extern "C" fn impact_config_default() -> *mut ImpactConfig {
    Box::into_raw(Box::new(ImpactConfig {
        inner: AnalysisConfig::default(),
    }))
}

/// Loads a TOML configuration file; missing keys take their defaults.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn impact_config_load(path: *const c_char, out: *mut *mut ImpactConfig) -> ImpactStatus {
    guard(|| {
        non_null!(out);
        let path = match path_arg(path) {
            Ok(p) => p,
            Err(s) => return s,
        };
        match AnalysisConfig::from_file(Path::new(path)) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(ImpactConfig { inner }));
                ImpactStatus::Ok
            }
            Err(e @ impact_core::config::ConfigError::Io { .. }) => fail(ImpactStatus::Io, e.to_string()),
            Err(e) => fail(ImpactStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// # Safety
/// `cfg` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn impact_config_free(cfg: *mut ImpactConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

unsafe fn config_or_default<'a>(cfg: *const ImpactConfig, slot: &'a mut Option<AnalysisConfig>) -> &'a AnalysisConfig {
    match cfg.as_ref() {
        Some(c) => &c.inner,
        None => slot.insert(AnalysisConfig::default()),
    }
}

// ---- sessions ----

/// One ingested session bundle.
pub struct ImpactSession {
    inner: Session,
    id: CString,
}

/// Reads the bundle directory at `path`.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn impact_session_open(path: *const c_char, out: *mut *mut ImpactSession) -> ImpactStatus {
    guard(|| {
        non_null!(out);
        let path = match path_arg(path) {
            Ok(p) => p,
            Err(s) => return s,
        };
        match session_store::ingest_bundle(path) {
            Ok(inner) => {
                let id = CString::new(inner.session_id.replace('\0', " ")).expect("no nul");
                *out = Box::into_raw(Box::new(ImpactSession { inner, id }));
                ImpactStatus::Ok
            }
            Err(e) => fail(session_status(&e), e.to_string()),
        }
    })
}

/// # Safety
/// `s` must come from [`impact_session_open`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn impact_session_free(s: *mut ImpactSession) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Session id, owned by the handle.
///
/// # Safety
/// `s` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn impact_session_id(s: *const ImpactSession) -> *const c_char {
    s.as_ref().map_or(ptr::null(), |s| s.id.as_ptr())
}

/// Manifest duration in seconds, or NaN for a null handle.
///
/// # Safety
/// `s` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn impact_session_duration(s: *const ImpactSession) -> f64 {
    s.as_ref().map_or(f64::NAN, |s| s.inner.duration)
}

/// Whether the session passes validation (no fatal issues).
///
/// # Safety
/// `s` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn impact_session_usable(s: *const ImpactSession) -> bool {
    s.as_ref().is_some_and(|s| session_store::validate_session(&s.inner).usable)
}

/// Per-session scores.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct ImpactMetrics {
    /// Net positive seconds.
    pub impact_score: f64,
    pub positive_s: f64,
    pub neutral_s: f64,
    pub negative_s: f64,
    pub survey_i: f64,
    pub survey_p: f64,
    pub successful: bool,
}

/// Scores the session's IMPACT stream at `rate_hz` plus its surveys.
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn impact_session_metrics(
    s: *const ImpactSession,
    rate_hz: f64,
    out: *mut ImpactMetrics,
) -> ImpactStatus {
    guard(|| {
        non_null!(s, out);
        if !(rate_hz > 0.0 && rate_hz.is_finite()) {
            return fail(ImpactStatus::InvalidArgument, "rate_hz must be positive");
        }
        match impact_metrics::session_metrics(&(*s).inner, rate_hz) {
            Ok(m) => {
                *out = ImpactMetrics {
                    impact_score: m.impact_score,
                    positive_s: m.dwell_s.pos,
                    neutral_s: m.dwell_s.neu,
                    negative_s: m.dwell_s.neg,
                    survey_i: m.survey_i,
                    survey_p: m.survey_p,
                    successful: m.success.is_success(),
                };
                ImpactStatus::Ok
            }
            Err(e) => fail(ImpactStatus::Validation, e.to_string()),
        }
    })
}

// ---- audio features ----

/// Name of audio feature `index`, static; null when out of range.
#[no_mangle]
pub extern "C" fn impact_audio_feature_name(index: usize) -> *const c_char {
    static NAMES: OnceLock<Vec<CString>> = OnceLock::new();
    let names = NAMES.get_or_init(|| {
        registry::FEATURES
            .iter()
            .map(|f| CString::new(f.name).expect("ascii name"))
            .collect()
    });
    names.get(index).map_or(ptr::null(), |c| c.as_ptr())
}

/// Extracts the audio feature vector of the session's participant audio.
/// `values` receives [`IMPACT_AUDIO_FEATURES`] entries, NaN where a feature
/// is absent; `usable` is set false when no voiced speech was found.
///
/// # Safety
/// `s` must be a live handle; `cfg` a live config or null; `values` must
/// hold `len` doubles; `usable` must be writable.
#[no_mangle]
pub unsafe extern "C" fn impact_session_audio_features(
    s: *const ImpactSession,
    cfg: *const ImpactConfig,
    values: *mut f64,
    len: usize,
    usable: *mut bool,
) -> ImpactStatus {
    guard(|| {
        non_null!(s, values, usable);
        if len < IMPACT_AUDIO_FEATURES {
            return fail(ImpactStatus::InvalidArgument, format!("need room for {IMPACT_AUDIO_FEATURES} values"));
        }
        let Some(track) = (*s).inner.participant_audio.as_ref() else {
            return fail(ImpactStatus::Validation, "session has no participant audio");
        };
        let mut slot = None;
        let fv = audio_dsp::audio_feature_vector(track, config_or_default(cfg, &mut slot));
        let out = std::slice::from_raw_parts_mut(values, IMPACT_AUDIO_FEATURES);
        for (o, v) in out.iter_mut().zip(&fv.values) {
            *o = v.unwrap_or(f64::NAN);
        }
        *usable = fv.usable;
        ImpactStatus::Ok
    })
}

// ---- emotion space ----

/// Maps one frame of [`IMPACT_NUM_EMOTIONS`] probabilities (canonical order)
/// onto the valence/activation plane.
///
/// # Safety
/// `probs` must hold `len` doubles; `x` and `y` must be writable.
#[no_mangle]
pub unsafe extern "C" fn impact_emotion_vector(probs: *const f64, len: usize, x: *mut f64, y: *mut f64) -> ImpactStatus {
    guard(|| {
        non_null!(probs, x, y);
        if len != NUM_EMOTIONS {
            return fail(ImpactStatus::InvalidArgument, format!("expected {NUM_EMOTIONS} probabilities"));
        }
        let mut f = EmotionFrame::zeros(0.0);
        f.p.copy_from_slice(std::slice::from_raw_parts(probs, len));
        let v = emotion_vector(&f, &EmotionMap::canonical());
        *x = v[0];
        *y = v[1];
        ImpactStatus::Ok
    })
}

// ---- statistics ----

/// Pearson chi-square of a 2x2 table (1 df, no continuity correction).
///
/// # Safety
/// `chi2` and `p` must be writable.
#[no_mangle]
pub unsafe extern "C" fn impact_chi_square_2x2(
    a: u64,
    b: u64,
    c: u64,
    d: u64,
    chi2: *mut f64,
    p: *mut f64,
) -> ImpactStatus {
    guard(|| {
        non_null!(chi2, p);
        match stats_report::chi_square_2x2(&ContingencyTable2x2::from_rows([[a, b], [c, d]])) {
            Ok(r) => {
                *chi2 = r.chi2;
                *p = r.p;
                ImpactStatus::Ok
            }
            Err(e) => fail(ImpactStatus::Compute, e.to_string()),
        }
    })
}

/// Area under the ROC curve; `labels` are nonzero for the positive class.
///
/// # Safety
/// `scores` and `labels` must hold `n` entries; `auc` must be writable.
#[no_mangle]
pub unsafe extern "C" fn impact_roc_auc(scores: *const f64, labels: *const u8, n: usize, auc: *mut f64) -> ImpactStatus {
    guard(|| {
        non_null!(scores, labels, auc);
        let s = std::slice::from_raw_parts(scores, n);
        let l: Vec<SuccessLabel> = std::slice::from_raw_parts(labels, n)
            .iter()
            .map(|&v| SuccessLabel::from_bool(v != 0))
            .collect();
        match predictor::roc_auc(s, &l) {
            Ok(r) => {
                *auc = r.auc;
                ImpactStatus::Ok
            }
            Err(e) => fail(ImpactStatus::Compute, e.to_string()),
        }
    })
}

// ---- linear SVM ----

/// A trained linear SVM.
pub struct ImpactModel {
    inner: SvmModel,
}

/// Trains on `n_rows` x `n_features` row-major data with labels nonzero for
/// the positive class. Features are standardized internally.
///
/// # Safety
/// `x` must hold `n_rows * n_features` doubles, `labels` `n_rows` bytes;
/// `cfg` a live config or null; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn impact_model_train(
    x: *const f64,
    n_rows: usize,
    n_features: usize,
    labels: *const u8,
    cfg: *const ImpactConfig,
    out: *mut *mut ImpactModel,
) -> ImpactStatus {
    guard(|| {
        non_null!(x, labels, out);
        let Some(total) = n_rows.checked_mul(n_features).filter(|&t| t > 0) else {
            return fail(ImpactStatus::InvalidArgument, "empty or oversized matrix");
        };
        let data = std::slice::from_raw_parts(x, total);
        let y = std::slice::from_raw_parts(labels, n_rows);
        let rows = data
            .chunks(n_features)
            .zip(y)
            .enumerate()
            .map(|(i, (r, &l))| Row {
                session_id: format!("row{i}"),
                x: r.to_vec(),
                y: SuccessLabel::from_bool(l != 0),
            })
            .collect();
        let names = (0..n_features).map(|j| format!("x{j}")).collect();
        let mut slot = None;
        let cfg = config_or_default(cfg, &mut slot);
        let result = Dataset::new(names, rows).and_then(|d| predictor::train_linear_svm(&d, &cfg.svm));
        match result {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(ImpactModel { inner }));
                ImpactStatus::Ok
            }
            Err(e) => fail(ImpactStatus::Compute, e.to_string()),
        }
    })
}

/// Decision value of one row; positive means the positive class.
///
/// # Safety
/// `m` must be a live model; `x` must hold `n_features` doubles; `out` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn impact_model_decision(
    m: *const ImpactModel,
    x: *const f64,
    n_features: usize,
    out: *mut f64,
) -> ImpactStatus {
    guard(|| {
        non_null!(m, x, out);
        let m = &(*m).inner;
        if n_features != m.w.len() {
            return fail(ImpactStatus::InvalidArgument, format!("model has {} features", m.w.len()));
        }
        *out = m.decision(std::slice::from_raw_parts(x, n_features));
        ImpactStatus::Ok
    })
}

/// # Safety
/// `m` must come from [`impact_model_train`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn impact_model_free(m: *mut ImpactModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}
