#ifndef GEC_EVAL_H
#define GEC_EVAL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every call.
typedef enum GecStatus {
  GEC_STATUS_OK = 0,
  GEC_STATUS_NULL_POINTER = 1,
  GEC_STATUS_INVALID_UTF8 = 2,
  GEC_STATUS_INVALID_ARGUMENT = 3,
  GEC_STATUS_IO = 4,
  GEC_STATUS_PARSE = 5,
  GEC_STATUS_SCORER = 6,
  GEC_STATUS_UNDEFINED = 7,
  GEC_STATUS_PANIC = 99,
} GecStatus;

// Character n-gram language model.
typedef struct GecLm GecLm;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL after a
// successful call. The pointer stays valid until the next call on the
// same thread; do not free it.
const char *gec_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *gec_version(void);

// Releases a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void gec_string_free(char *s);

// NFC-normalized, whitespace-collapsed copy of `input`.
//
// # Safety
// `input` must be a NUL-terminated string; `result` must be writable.
enum GecStatus gec_normalize(const char *input, char **result);

// Character-level Levenshtein distance.
//
// # Safety
// `a` and `b` must be NUL-terminated strings; `result` must be writable.
enum GecStatus gec_levenshtein(const char *a, const char *b, size_t *result);

// Levenshtein distance divided by the longer string's length.
//
// # Safety
// `a` and `b` must be NUL-terminated strings; `result` must be writable.
enum GecStatus gec_nld(const char *a, const char *b, double *result);

// Corpus GLEU with one reference per sentence and default settings.
//
// # Safety
// The three arrays must each hold `n` NUL-terminated strings.
enum GecStatus gec_gleu(const char *const *sources,
                        const char *const *hypotheses,
                        const char *const *references,
                        size_t n,
                        double *result);

// Quadratically weighted kappa of two rating arrays with values in
// `1..=categories`.
//
// # Safety
// `a` and `b` must each point to `n` readable values.
enum GecStatus gec_qwk(const uint32_t *a,
                       const uint32_t *b,
                       size_t n,
                       uint32_t categories,
                       double *result);

// Trains a model on `n` sentences.
//
// # Safety
// `sentences` must hold `n` NUL-terminated strings; `lm` must be writable.
enum GecStatus gec_lm_train(const char *const *sentences,
                            size_t n,
                            size_t order,
                            double k,
                            struct GecLm **lm);

// Loads a model saved by [`gec_lm_save`] or the command-line tool.
//
// # Safety
// `path` must be a NUL-terminated string; `lm` must be writable.
enum GecStatus gec_lm_load(const char *path, struct GecLm **lm);

// # Safety
// `lm` must be a live handle; `path` a NUL-terminated string.
enum GecStatus gec_lm_save(const struct GecLm *lm, const char *path);

// Natural-log probability of `input` and the number of predicted symbols.
//
// # Safety
// `lm` must be a live handle; the out-pointers must be writable.
enum GecStatus gec_lm_score(const struct GecLm *lm,
                            const char *input,
                            double *log_prob,
                            uint64_t *token_count);

// Releases a model handle. NULL is ignored.
//
// # Safety
// `lm` must come from this library and not have been freed.
void gec_lm_free(struct GecLm *lm);

// Sentence Scribendi score (-1, 0 or 1). `lm` may be NULL, in which case
// only sentences decided without a model succeed.
//
// # Safety
// Strings must be NUL-terminated; `lm` NULL or a live handle.
enum GecStatus gec_scribendi(const char *source,
                             const char *hypothesis,
                             const struct GecLm *lm,
                             double threshold,
                             int8_t *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GEC_EVAL_H */
