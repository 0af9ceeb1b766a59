//! The audio feature registry: canonical names, units and formulas of the
//! 53-entry vector, in output order.

use serde::Serialize;

pub const REGISTRY_VERSION: &str = "audio-features-53/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FeatureSpec {
    pub name: &'static str,
    pub unit: &'static str,
    pub subset: u8,
    pub formula: &'static str,
}

const fn f(name: &'static str, unit: &'static str, subset: u8, formula: &'static str) -> FeatureSpec {
    FeatureSpec {
        name,
        unit,
        subset,
        formula,
    }
}

pub const FEATURES: [FeatureSpec; 53] = [
    f("f0_mean_hz", "Hz", 1, "mean F0 over voiced 0.5 s windows"),
    f("f0_median_hz", "Hz", 1, "median F0 over voiced windows"),
    f("f0_min_hz", "Hz", 1, "minimum F0 over voiced windows"),
    f("f0_max_hz", "Hz", 1, "maximum F0 over voiced windows"),
    f("f0_sd_hz", "Hz", 1, "population standard deviation of F0 over voiced windows"),
    f("f0_q25_hz", "Hz", 1, "25th percentile of F0 over voiced windows"),
    f("f0_q75_hz", "Hz", 1, "75th percentile of F0 over voiced windows"),
    f("jitter_local", "ratio", 1, "mean |T[k+1]-T[k]| / mean T, averaged over windows"),
    f("jitter_local_abs_s", "s", 1, "mean |T[k+1]-T[k]|, averaged over windows"),
    f("jitter_rap", "ratio", 1, "3-point relative average perturbation"),
    f("jitter_ppq5", "ratio", 1, "5-point period perturbation quotient"),
    f("shimmer_local", "ratio", 1, "mean |A[k+1]-A[k]| / mean A, averaged over windows"),
    f("shimmer_local_db", "dB", 1, "mean |20 log10(A[k+1]/A[k])|"),
    f("shimmer_apq3", "ratio", 1, "3-point amplitude perturbation quotient"),
    f("shimmer_apq5", "ratio", 1, "5-point amplitude perturbation quotient"),
    f("hnr_mean_db", "dB", 1, "mean of 10 log10(r/(1-r)) over active windows, capped at 40 dB"),
    f("hnr_sd_db", "dB", 1, "population standard deviation of window HNR"),
    f("f1_mean_hz", "Hz", 1, "mean F1 over voiced windows"),
    f("f2_mean_hz", "Hz", 1, "mean F2 over voiced windows"),
    f("f3_mean_hz", "Hz", 1, "mean F3 over voiced windows"),
    f("f4_mean_hz", "Hz", 1, "mean F4 over voiced windows"),
    f("f1_median_hz", "Hz", 1, "median F1 over voiced windows"),
    f("f2_median_hz", "Hz", 1, "median F2 over voiced windows"),
    f("f3_median_hz", "Hz", 1, "median F3 over voiced windows"),
    f("f4_median_hz", "Hz", 1, "median F4 over voiced windows"),
    f("f1_sd_hz", "Hz", 1, "population standard deviation of F1"),
    f("f2_sd_hz", "Hz", 1, "population standard deviation of F2"),
    f("f3_sd_hz", "Hz", 1, "population standard deviation of F3"),
    f("f4_sd_hz", "Hz", 1, "population standard deviation of F4"),
    f("b1_mean_hz", "Hz", 1, "mean F1 bandwidth"),
    f("b2_mean_hz", "Hz", 1, "mean F2 bandwidth"),
    f("b3_mean_hz", "Hz", 1, "mean F3 bandwidth"),
    f("b4_mean_hz", "Hz", 1, "mean F4 bandwidth"),
    f("intensity_mean_db", "dBFS", 1, "mean 50 ms Hann intensity over voice-active frames"),
    f("intensity_sd_db", "dB", 1, "population standard deviation of active intensity"),
    f("intensity_min_db", "dBFS", 1, "minimum active intensity"),
    f("intensity_max_db", "dBFS", 1, "maximum active intensity"),
    f("voiced_fraction", "ratio", 1, "voiced windows / analyzed windows"),
    f("zcr_mean", "ratio", 1, "mean zero-crossing rate of voice-active 10 ms frames"),
    f("average_formant_hz", "Hz", 2, "(F1+F2+F3+F4)/4 of the formant means"),
    f("formant_dispersion_hz", "Hz", 2, "(F4-F1)/3"),
    f("gpr_vtl_interaction", "Hz*cm", 2, "f0_mean_hz * vocal_tract_length_cm"),
    f("vocal_tract_length_cm", "cm", 2, "35000 / (2 * formant_spacing_hz)"),
    f("formant_spacing_hz", "Hz", 2, "mean of consecutive formant differences"),
    f("speech_duration_s", "s", 3, "duration after silence removal"),
    f("syllable_count", "count", 3, "intensity peaks at least 2 dB above the preceding dip"),
    f("phonation_time_s", "s", 3, "total voice-active time"),
    f("pause_count", "count", 3, "silences of at least pause.min_s between active segments"),
    f("speech_rate_per_s", "1/s", 3, "syllable_count / speech_duration_s"),
    f("articulation_rate_per_s", "1/s", 3, "syllable_count / phonation_time_s"),
    f("phonation_ratio", "ratio", 3, "phonation_time_s / speech_duration_s"),
    f("total_pause_s", "s", 3, "summed pause duration"),
    f("voiced_segment_count", "count", 3, "number of voice-active segments"),
];

pub fn feature_names() -> Vec<&'static str> {
    FEATURES.iter().map(|f| f.name).collect()
}

pub fn feature_index(name: &str) -> Option<usize> {
    FEATURES.iter().position(|f| f.name == name)
}

#[derive(Serialize)]
struct RegistryFile<'a> {
    version: &'a str,
    features: &'a [FeatureSpec],
}

/// The registry as shipped in `data/feature_registry.json`.
pub fn registry_json() -> String {
    let mut s = serde_json::to_string_pretty(&RegistryFile {
        version: REGISTRY_VERSION,
        features: &FEATURES,
    })
    .expect("registry serializes");
    s.push('\n');
    s
}
