#ifndef IMPACT_H
#define IMPACT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Number of entries in the audio feature vector.
#define IMPACT_AUDIO_FEATURES 53

// Number of emotion probabilities per frame.
#define IMPACT_NUM_EMOTIONS 48

// Result of every fallible call.
typedef enum ImpactStatus {
  IMPACT_STATUS_OK = 0,
  IMPACT_STATUS_NULL_POINTER = 1,
  IMPACT_STATUS_INVALID_UTF8 = 2,
  IMPACT_STATUS_INVALID_ARGUMENT = 3,
  IMPACT_STATUS_IO = 4,
  IMPACT_STATUS_VALIDATION = 5,
  IMPACT_STATUS_COMPUTE = 6,
  IMPACT_STATUS_PANIC = 7,
} ImpactStatus;

// Analysis configuration. Functions taking one accept null for defaults.
typedef struct ImpactConfig ImpactConfig;

// A trained linear SVM.
typedef struct ImpactModel ImpactModel;

// One ingested session bundle.
typedef struct ImpactSession ImpactSession;

// Per-session scores.
typedef struct ImpactMetrics {
  // Net positive seconds.
  double impact_score;
  double positive_s;
  double neutral_s;
  double negative_s;
  double survey_i;
  double survey_p;
  bool successful;
} ImpactMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. Valid until the
// next call into this library on the same thread.
const char *impact_last_error(void);

// Library version, static.
const char *impact_version(void);

struct ImpactConfig *impact_config_default(void);

// Loads a TOML configuration file; missing keys take their defaults.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum ImpactStatus impact_config_load(const char *path, struct ImpactConfig **out);

// # Safety
// `cfg` must come from this library and not be used afterwards.
void impact_config_free(struct ImpactConfig *cfg);

// Reads the bundle directory at `path`.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum ImpactStatus impact_session_open(const char *path, struct ImpactSession **out);

// # Safety
// `s` must come from [`impact_session_open`] and not be used afterwards.
void impact_session_free(struct ImpactSession *s);

// Session id, owned by the handle.
//
// # Safety
// `s` must be a live handle or null.
const char *impact_session_id(const struct ImpactSession *s);

// Manifest duration in seconds, or NaN for a null handle.
//
// # Safety
// `s` must be a live handle or null.
double impact_session_duration(const struct ImpactSession *s);

// Whether the session passes validation (no fatal issues).
//
// # Safety
// `s` must be a live handle or null.
bool impact_session_usable(const struct ImpactSession *s);

// Scores the session's IMPACT stream at `rate_hz` plus its surveys.
//
// # Safety
// `s` must be a live handle; `out` must be writable.
enum ImpactStatus impact_session_metrics(const struct ImpactSession *s,
                                         double rate_hz,
                                         struct ImpactMetrics *out);

// Name of audio feature `index`, static; null when out of range.
const char *impact_audio_feature_name(size_t index);

// Extracts the audio feature vector of the session's participant audio.
// `values` receives [`IMPACT_AUDIO_FEATURES`] entries, NaN where a feature
// is absent; `usable` is set false when no voiced speech was found.
//
// # Safety
// `s` must be a live handle; `cfg` a live config or null; `values` must
// hold `len` doubles; `usable` must be writable.
enum ImpactStatus impact_session_audio_features(const struct ImpactSession *s,
                                                const struct ImpactConfig *cfg,
                                                double *values,
                                                size_t len,
                                                bool *usable);

// Maps one frame of [`IMPACT_NUM_EMOTIONS`] probabilities (canonical order)
// onto the valence/activation plane.
//
// # Safety
// `probs` must hold `len` doubles; `x` and `y` must be writable.
enum ImpactStatus impact_emotion_vector(const double *probs, size_t len, double *x, double *y);

// Pearson chi-square of a 2x2 table (1 df, no continuity correction).
//
// # Safety
// `chi2` and `p` must be writable.
enum ImpactStatus impact_chi_square_2x2(uint64_t a,
                                        uint64_t b,
                                        uint64_t c,
                                        uint64_t d,
                                        double *chi2,
                                        double *p);

// Area under the ROC curve; `labels` are nonzero for the positive class.
//
// # Safety
// `scores` and `labels` must hold `n` entries; `auc` must be writable.
enum ImpactStatus impact_roc_auc(const double *scores,
                                 const uint8_t *labels,
                                 size_t n,
                                 double *auc);

// Trains on `n_rows` x `n_features` row-major data with labels nonzero for
// the positive class. Features are standardized internally.
//
// # Safety
// `x` must hold `n_rows * n_features` doubles, `labels` `n_rows` bytes;
// `cfg` a live config or null; `out` must be writable.
enum ImpactStatus impact_model_train(const double *x,
                                     size_t n_rows,
                                     size_t n_features,
                                     const uint8_t *labels,
                                     const struct ImpactConfig *cfg,
                                     struct ImpactModel **out);

// Decision value of one row; positive means the positive class.
//
// # Safety
// `m` must be a live model; `x` must hold `n_features` doubles; `out` must
// be writable.
enum ImpactStatus impact_model_decision(const struct ImpactModel *m,
                                        const double *x,
                                        size_t n_features,
                                        double *out);

// # Safety
// `m` must come from [`impact_model_train`] and not be used afterwards.
void impact_model_free(struct ImpactModel *m);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IMPACT_H */
