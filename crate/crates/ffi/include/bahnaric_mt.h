#ifndef BAHNARIC_MT_H
#define BAHNARIC_MT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

// Result of every fallible call.
typedef enum BvmtStatus {
  BVMT_STATUS_OK = 0,
  // A required pointer argument was null.
  BVMT_STATUS_NULL_ARGUMENT = 1,
  // A string argument was not valid UTF-8.
  BVMT_STATUS_INVALID_UTF8 = 2,
  // A numeric or enum argument was out of range.
  BVMT_STATUS_INVALID_ARGUMENT = 3,
  // A file could not be read or its contents are malformed.
  BVMT_STATUS_DATA_ERROR = 4,
  // The translation backend failed.
  BVMT_STATUS_BACKEND_ERROR = 5,
  // An internal panic was caught at the boundary.
  BVMT_STATUS_PANIC = 6,
} BvmtStatus;

typedef enum BvmtMockMode {
  BVMT_MOCK_MODE_IDENTITY = 0,
  BVMT_MOCK_MODE_DICTIONARY_GLOSS = 1,
} BvmtMockMode;

typedef enum BvmtTieBreak {
  BVMT_TIE_BREAK_GLOSS_FREQUENCY = 0,
  BVMT_TIE_BREAK_DICTIONARY_ORDER = 1,
} BvmtTieBreak;

// A chunk translation backend.
typedef struct BvmtBackend BvmtBackend;

// Dictionary, lexicon, co-occurrence index and disambiguation settings.
typedef struct BvmtResources BvmtResources;

typedef struct BvmtBleuReport {
  // 0 to 100.
  double bleu;
  double precisions[4];
  double brevity_penalty;
  size_t hyp_length;
  size_t ref_length;
} BvmtBleuReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Loads resources from files. `lexicon_path` and `cooc_path` may be null
// for empty defaults. A `.tsv` index path is read as TSV. `tie_break` is a
// `BvmtTieBreak` value.
//
// # Safety
// String arguments must be null or valid NUL-terminated strings; `out`
// must be a valid pointer.
enum BvmtStatus bvmt_resources_load(const char *dict_path,
                                    const char *lexicon_path,
                                    const char *cooc_path,
                                    uint32_t window,
                                    uint32_t tie_break,
                                    struct BvmtResources **out);

// Like [`bvmt_resources_load`] but takes JSON documents instead of paths.
//
// # Safety
// String arguments must be null or valid NUL-terminated strings; `out`
// must be a valid pointer.
enum BvmtStatus bvmt_resources_from_json(const char *dict_json,
                                         const char *lexicon_json,
                                         const char *cooc_json,
                                         uint32_t window,
                                         uint32_t tie_break,
                                         struct BvmtResources **out);

// # Safety
// `resources` must be null or a handle from this library, freed once.
void bvmt_resources_free(struct BvmtResources *resources);

// An in-process mock backend; `mode` is a `BvmtMockMode` value. Gloss
// mode uses the dictionary of `resources`, which may be null for identity
// mode.
//
// # Safety
// `resources` must be null or a live handle; `out` must be valid.
enum BvmtStatus bvmt_backend_mock(uint32_t mode,
                                  const struct BvmtResources *resources,
                                  struct BvmtBackend **out);

// A client for a chunk translation server at `base_url`.
//
// # Safety
// `base_url` must be a valid NUL-terminated string; `out` must be valid.
enum BvmtStatus bvmt_backend_remote(const char *base_url,
                                    uint64_t timeout_ms,
                                    size_t max_batch,
                                    uint32_t retries,
                                    struct BvmtBackend **out);

// # Safety
// `backend` must be null or a handle from this library, freed once.
void bvmt_backend_free(struct BvmtBackend *backend);

// Translates one sentence. `out_trace_json` may be null; otherwise it
// receives the per-segment trace as JSON. On a backend failure the trace,
// if requested, holds the partial records.
//
// # Safety
// Handles must be live; `text` must be a valid string; `out_translation`
// must be valid.
enum BvmtStatus bvmt_translate(const struct BvmtResources *resources,
                               const struct BvmtBackend *backend,
                               const char *text,
                               char **out_translation,
                               char **out_trace_json);

// Segments and classifies a sentence; writes a JSON array of segments.
//
// # Safety
// `resources` must be live; `text` must be a valid string; `out_json`
// must be valid.
enum BvmtStatus bvmt_segment_json(const struct BvmtResources *resources,
                                  const char *text,
                                  char **out_json);

// Corpus BLEU-4 of newline-separated hypotheses against references.
//
// # Safety
// String arguments must be valid; `out` must be valid.
enum BvmtStatus bvmt_corpus_bleu(const char *hypotheses,
                                 const char *references,
                                 struct BvmtBleuReport *out);

// Message for the most recent failure on this thread, or null. Valid
// until the next failing call on the same thread.
const char *bvmt_last_error(void);

// # Safety
// `s` must be null or a string returned by this library, freed once.
void bvmt_string_free(char *s);

// Library version, statically allocated.
const char *bvmt_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BAHNARIC_MT_H */
