/* C interface for the acumen meta-evaluation engine. */

#ifndef ACUMEN_H
#define ACUMEN_H

/* Generated by cbindgen from crates/acumen-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Correlation coefficient selector for [`acumen_correlation`].
 */
typedef enum AcumenCorrKind {
  ACUMEN_CORR_KIND_PEARSON = 0,
  ACUMEN_CORR_KIND_SPEARMAN = 1,
  ACUMEN_CORR_KIND_KENDALL = 2,
} AcumenCorrKind;

/**
 * Aggregation level selector for [`acumen_correlation`].
 */
typedef enum AcumenCorrLevel {
  ACUMEN_CORR_LEVEL_SYSTEM = 0,
  ACUMEN_CORR_LEVEL_SUMMARY = 1,
} AcumenCorrLevel;

/**
 * Overlap variant selector for [`acumen_rouge`].
 */
typedef enum AcumenRougeVariant {
  ACUMEN_ROUGE_VARIANT_ROUGE1 = 0,
  ACUMEN_ROUGE_VARIANT_ROUGE2 = 1,
  ACUMEN_ROUGE_VARIANT_ROUGE_L = 2,
} AcumenRougeVariant;

/**
 * Distance scale selector for [`acumen_krippendorff`].
 */
typedef enum AcumenScale {
  ACUMEN_SCALE_NOMINAL = 0,
  ACUMEN_SCALE_INTERVAL = 1,
} AcumenScale;

/**
 * Result of every fallible call in this interface.
 */
typedef enum AcumenStatus {
  /**
   * The call succeeded and all out-parameters are filled in.
   */
  ACUMEN_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  ACUMEN_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  ACUMEN_STATUS_INVALID_UTF8 = 2,
  /**
   * Reading or parsing input data failed.
   */
  ACUMEN_STATUS_LOAD_FAILED = 3,
  /**
   * The computation itself failed; see the error message.
   */
  ACUMEN_STATUS_COMPUTE_FAILED = 4,
  /**
   * The statistic is undefined for this input (zero variance).
   */
  ACUMEN_STATUS_DEGENERATE = 5,
  /**
   * A scalar argument was out of range or an index out of bounds.
   */
  ACUMEN_STATUS_BAD_ARGUMENT = 6,
  /**
   * An internal invariant was violated; the library state is still sound.
   */
  ACUMEN_STATUS_PANICKED = 7,
} AcumenStatus;

/**
 * An annotated benchmark loaded into memory. Opaque; create with
 * [`acumen_corpus_load`] and release with [`acumen_corpus_free`].
 */
typedef struct AcumenCorpus AcumenCorpus;

/**
 * A dense example-by-system score grid. Opaque; release with
 * [`acumen_matrix_free`].
 */
typedef struct AcumenMatrix AcumenMatrix;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string. Do not free.
 */
const char *acumen_version(void);

/**
 * Message describing the most recent failure on the calling thread, or an
 * empty string if none occurred. The pointer stays valid until the next
 * call into the library from the same thread. Do not free.
 */
const char *acumen_last_error_message(void);

/**
 * Releases a string returned through an out-parameter of this library.
 * Passing null is a no-op.
 *
 * # Safety
 * `s` must be null or a pointer previously returned by this library and
 * not yet freed.
 */
void acumen_string_free(char *s);

/**
 * Loads a benchmark directory: `examples.jsonl` plus whichever of
 * `outputs.jsonl`, `acu_annotations.jsonl`, `likert_annotations.jsonl`,
 * and the CSV matrices under `metrics/` are present. On success writes an
 * owned handle to `out_corpus`; release it with [`acumen_corpus_free`].
 *
 * # Safety
 * `dir` must be a NUL-terminated string and `out_corpus` a valid pointer.
 */
enum AcumenStatus acumen_corpus_load(const char *dir, struct AcumenCorpus **out_corpus);

/**
 * Releases a corpus handle. Passing null is a no-op.
 *
 * # Safety
 * `corpus` must be null or an unfreed handle from [`acumen_corpus_load`].
 */
void acumen_corpus_free(struct AcumenCorpus *corpus);

/**
 * Writes the number of examples and the number of distinct systems with
 * outputs in the corpus.
 *
 * # Safety
 * All pointers must be valid; `corpus` must be an unfreed handle.
 */
enum AcumenStatus acumen_corpus_counts(const struct AcumenCorpus *corpus,
                                       size_t *out_examples,
                                       size_t *out_systems);

/**
 * Computes the matched-fraction score grid from the corpus's unit-match
 * annotations, without length normalization. On success writes an owned
 * handle to `out_matrix`; release it with [`acumen_matrix_free`].
 *
 * # Safety
 * All pointers must be valid; `corpus` must be an unfreed handle.
 */
enum AcumenStatus acumen_acu_scores_raw(const struct AcumenCorpus *corpus,
                                        struct AcumenMatrix **out_matrix);

/**
 * Computes the length-normalized score grid with the given normalization
 * strength `alpha` (must be positive). On success writes an owned handle
 * to `out_matrix`; release it with [`acumen_matrix_free`].
 *
 * # Safety
 * All pointers must be valid; `corpus` must be an unfreed handle.
 */
enum AcumenStatus acumen_acu_scores_normalized(const struct AcumenCorpus *corpus,
                                               double alpha,
                                               struct AcumenMatrix **out_matrix);

/**
 * Grid-searches the normalization strength that minimizes the absolute
 * correlation between normalized scores and summary lengths, using the
 * default grid. Writes the chosen strength to `out_alpha` and the residual
 * correlation to `out_residual`.
 *
 * # Safety
 * All pointers must be valid; `corpus` must be an unfreed handle.
 */
enum AcumenStatus acumen_calibrate_alpha(const struct AcumenCorpus *corpus,
                                         double *out_alpha,
                                         double *out_residual);

/**
 * Reads a score matrix from CSV (`example_id` column then one column per
 * system; `#` lines are comments). On success writes an owned handle to
 * `out_matrix`; release it with [`acumen_matrix_free`].
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out_matrix` a valid pointer.
 */
enum AcumenStatus acumen_matrix_read_csv(const char *path, struct AcumenMatrix **out_matrix);

/**
 * Writes a score matrix to CSV in the same format read by
 * [`acumen_matrix_read_csv`].
 *
 * # Safety
 * `matrix` must be an unfreed handle and `path` a NUL-terminated string.
 */
enum AcumenStatus acumen_matrix_write_csv(const struct AcumenMatrix *matrix, const char *path);

/**
 * Releases a matrix handle. Passing null is a no-op.
 *
 * # Safety
 * `matrix` must be null or an unfreed handle from this library.
 */
void acumen_matrix_free(struct AcumenMatrix *matrix);

/**
 * Writes the matrix dimensions: number of example rows and system columns.
 *
 * # Safety
 * All pointers must be valid; `matrix` must be an unfreed handle.
 */
enum AcumenStatus acumen_matrix_shape(const struct AcumenMatrix *matrix,
                                      size_t *out_examples,
                                      size_t *out_systems);

/**
 * Writes the score at (`row`, `col`) to `out_value`. Out-of-bounds indices
 * yield `BadArgument`.
 *
 * # Safety
 * All pointers must be valid; `matrix` must be an unfreed handle.
 */
enum AcumenStatus acumen_matrix_get(const struct AcumenMatrix *matrix,
                                    size_t row,
                                    size_t col,
                                    double *out_value);

/**
 * Copies all scores row-major into `buffer`, which must hold exactly
 * `rows * cols` doubles as reported by [`acumen_matrix_shape`].
 *
 * # Safety
 * `buffer` must point to `len` writable doubles; `matrix` must be an
 * unfreed handle.
 */
enum AcumenStatus acumen_matrix_copy_values(const struct AcumenMatrix *matrix,
                                            double *buffer,
                                            size_t len);

/**
 * Writes a copy of the system name for column `index` to `out_name`.
 * Release the copy with [`acumen_string_free`].
 *
 * # Safety
 * All pointers must be valid; `matrix` must be an unfreed handle.
 */
enum AcumenStatus acumen_matrix_system_name(const struct AcumenMatrix *matrix,
                                            size_t index,
                                            char **out_name);

/**
 * Writes a copy of the example id for row `index` to `out_id`. Release the
 * copy with [`acumen_string_free`].
 *
 * # Safety
 * All pointers must be valid; `matrix` must be an unfreed handle.
 */
enum AcumenStatus acumen_matrix_example_id(const struct AcumenMatrix *matrix,
                                           size_t index,
                                           char **out_id);

/**
 * Correlates two aligned score matrices. `kind` is an [`AcumenCorrKind`]
 * value and `level` an [`AcumenCorrLevel`] value. A statistic that is
 * undefined for the data (zero variance everywhere) yields `Degenerate`
 * and writes NaN.
 *
 * # Safety
 * All pointers must be valid; both matrices must be unfreed handles.
 */
enum AcumenStatus acumen_correlation(const struct AcumenMatrix *x,
                                     const struct AcumenMatrix *y,
                                     int kind,
                                     int level,
                                     double *out_value);

/**
 * Scores `candidate` against `reference` with the selected overlap
 * variant (an [`AcumenRougeVariant`] value); `stem` applies light suffix
 * stripping first. Writes recall, precision, and F1.
 *
 * # Safety
 * Strings must be NUL-terminated; out-pointers must be valid.
 */
enum AcumenStatus acumen_rouge(const char *reference,
                               const char *candidate,
                               int variant,
                               bool stem,
                               double *out_recall,
                               double *out_precision,
                               double *out_f1);

/**
 * Scores `candidate` against `reference` with character n-gram F-score.
 *
 * # Safety
 * Strings must be NUL-terminated; `out_score` must be valid.
 */
enum AcumenStatus acumen_chrf(const char *reference, const char *candidate, double *out_score);

/**
 * Scores `candidate` against `reference` with smoothed sentence-level
 * n-gram precision and a brevity penalty.
 *
 * # Safety
 * Strings must be NUL-terminated; `out_score` must be valid.
 */
enum AcumenStatus acumen_bleu(const char *reference, const char *candidate, double *out_score);

/**
 * Applies the length penalty to a matched fraction `f`: summaries no
 * longer than the reference keep their score, longer ones decay
 * exponentially at a rate set by `alpha`. `cand_len` and `ref_len` are
 * word counts; `ref_len` must be positive and `alpha` must be positive.
 *
 * # Safety
 * `out_score` must be a valid pointer.
 */
enum AcumenStatus acumen_normalized_score(double f,
                                          size_t cand_len,
                                          size_t ref_len,
                                          double alpha,
                                          double *out_score);

/**
 * Runs the paired bootstrap test for mean(a) > mean(b) on two aligned
 * score vectors of length `len` (at least 2) and writes the one-sided
 * probability that the advantage disappears under resampling.
 *
 * # Safety
 * `a` and `b` must address `len` readable doubles; `out_p_value` must be
 * valid.
 */
enum AcumenStatus acumen_paired_bootstrap(const double *a,
                                          const double *b,
                                          size_t len,
                                          uint64_t seed,
                                          size_t resamples,
                                          double *out_p_value);

/**
 * Estimates the probability of detecting the observed difference between
 * `a` and `b` when experiments draw `sample_size` paired examples: runs
 * `trials` simulated experiments, each tested with `resamples` bootstrap
 * draws at significance `alpha_level`, and writes the detection rate.
 *
 * # Safety
 * `a` and `b` must address `len` readable doubles; `out_power` must be
 * valid.
 */
enum AcumenStatus acumen_power(const double *a,
                               const double *b,
                               size_t len,
                               uint64_t seed,
                               size_t trials,
                               size_t resamples,
                               double alpha_level,
                               size_t sample_size,
                               double *out_power);

/**
 * Computes Krippendorff's agreement coefficient over rating units passed
 * in flattened form: `values` holds all ratings back to back and
 * `unit_sizes[i]` says how many of them belong to unit `i`. `scale` is an
 * [`AcumenScale`] value.
 *
 * # Safety
 * `values` must address the sum of `unit_sizes` readable doubles and
 * `unit_sizes` must address `n_units` readable entries; both may be null
 * only when `n_units` is 0. `out_alpha` must be valid.
 */
enum AcumenStatus acumen_krippendorff(const double *values,
                                      const size_t *unit_sizes,
                                      size_t n_units,
                                      int scale,
                                      double *out_alpha);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ACUMEN_H */
