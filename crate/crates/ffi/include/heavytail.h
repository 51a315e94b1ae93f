#ifndef HEAVYTAIL_H
#define HEAVYTAIL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HtStatus {
  HT_STATUS_OK = 0,
  HT_STATUS_NULL_POINTER = 1,
  HT_STATUS_INVALID_ARGUMENT = 2,
  HT_STATUS_TOO_FEW_OBSERVATIONS = 3,
  HT_STATUS_COMPUTATION_FAILED = 4,
  HT_STATUS_BUFFER_TOO_SMALL = 5,
  HT_STATUS_PANIC = 6,
} HtStatus;

typedef enum HtFitMethod {
  HT_FIT_METHOD_MLE = 0,
  HT_FIT_METHOD_QUANTILE = 1,
} HtFitMethod;

typedef enum HtModel {
  HT_MODEL_GAUSSIAN = 0,
  HT_MODEL_STABLE = 1,
  HT_MODEL_NIG = 2,
} HtModel;

// Goodness-of-fit report for one model.
typedef struct HtGofReport HtGofReport;

// Stable law with a precomputed density and distribution grid.
typedef struct HtStableLaw HtStableLaw;

typedef struct HtStableParams {
  double alpha;
  double beta;
  double gamma;
  double mu;
} HtStableParams;

typedef struct HtNigParams {
  double alpha;
  double beta;
  double delta;
  double mu;
} HtNigParams;

typedef struct HtTailFit {
  double alpha_tail;
  double xmin;
  size_t n_tail;
  double ks_at_xmin;
} HtTailFit;

typedef struct HtGofConfig {
  // At least 100.
  size_t replications;
  // In (0, 0.5).
  double significance;
  enum HtFitMethod inner_fit;
  uint64_t seed;
} HtGofConfig;

typedef struct HtGofSummary {
  double ks_stat;
  double ks_limit;
  double p_value;
  double chi2_stat;
  uint32_t chi2_dof;
  double chi2_pvalue;
  // NaN unless the model is Gaussian.
  double ad_stat;
  bool rejected;
} HtGofSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the calling thread's last error message, NUL terminated, into
// `buf` (truncating to `len`). Returns the full message length without the
// terminator, or 0 when there is none.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
size_t ht_last_error_message(char *buf, size_t len);

// Library version as a static NUL-terminated string.
const char *ht_version(void);

// Stable density by direct inversion of the characteristic function.
//
// # Safety
// `out` must be a valid pointer.
enum HtStatus ht_stable_pdf(struct HtStableParams params, double x, double *out);

// # Safety
// `out` must be a valid pointer.
enum HtStatus ht_stable_cdf(struct HtStableParams params, double x, double *out);

// Writes `n` draws from stream `(seed, stream)` into `out`.
//
// # Safety
// `out` must point to `n` writable doubles.
enum HtStatus ht_stable_sample(struct HtStableParams params,
                               uint64_t seed,
                               uint64_t stream,
                               size_t n,
                               double *out);

// Fits a stable law. `log_likelihood` may be null.
//
// # Safety
// `data` must point to `n` doubles; `out` must be valid.
enum HtStatus ht_stable_fit(const double *data,
                            size_t n,
                            enum HtFitMethod method,
                            struct HtStableParams *out,
                            double *log_likelihood);

// Builds a reusable stable law; release it with [`ht_stable_law_free`].
//
// # Safety
// `out` must be a valid pointer.
enum HtStatus ht_stable_law_new(struct HtStableParams params, struct HtStableLaw **out);

// # Safety
// `law` must come from [`ht_stable_law_new`] and not be used afterwards.
void ht_stable_law_free(struct HtStableLaw *law);

// # Safety
// `law` must be a live handle and `out` valid.
enum HtStatus ht_stable_law_pdf(const struct HtStableLaw *law, double x, double *out);

// # Safety
// `law` must be a live handle and `out` valid.
enum HtStatus ht_stable_law_cdf(const struct HtStableLaw *law, double x, double *out);

// # Safety
// `law` must be a live handle and `out` valid.
enum HtStatus ht_stable_law_quantile(const struct HtStableLaw *law, double q, double *out);

// # Safety
// `out` must be a valid pointer.
enum HtStatus ht_nig_pdf(struct HtNigParams params, double x, double *out);

// # Safety
// `out` must be a valid pointer.
enum HtStatus ht_nig_cdf(struct HtNigParams params, double x, double *out);

// # Safety
// `out` must point to `n` writable doubles.
enum HtStatus ht_nig_sample(struct HtNigParams params,
                            uint64_t seed,
                            uint64_t stream,
                            size_t n,
                            double *out);

// Maximum-likelihood NIG fit. `log_likelihood` may be null.
//
// # Safety
// `data` must point to `n` doubles; `out` must be valid.
enum HtStatus ht_nig_fit(const double *data,
                         size_t n,
                         struct HtNigParams *out,
                         double *log_likelihood);

// Power-law tail fit over magnitudes of both signs.
//
// # Safety
// `data` must point to `n` doubles; `out` must be valid.
enum HtStatus ht_tail_fit(const double *data, size_t n, struct HtTailFit *out);

// Bootstrap goodness-of-fit of one model; release the report with
// [`ht_gof_report_free`].
//
// # Safety
// `data` must point to `n` doubles; `out` must be valid.
enum HtStatus ht_gof_run(const double *data,
                         size_t n,
                         enum HtModel model,
                         struct HtGofConfig config,
                         struct HtGofReport **out);

// # Safety
// `report` must be a live handle and `out` valid.
enum HtStatus ht_gof_report_summary(const struct HtGofReport *report, struct HtGofSummary *out);

// Copies the report as NUL-terminated JSON into `buf`. `needed` (may be
// null) receives the required size including the terminator; with a short
// or null buffer the call returns `BufferTooSmall` and writes nothing.
//
// # Safety
// `report` must be a live handle; `buf` null or `len` writable bytes.
enum HtStatus ht_gof_report_json(const struct HtGofReport *report,
                                 char *buf,
                                 size_t len,
                                 size_t *needed);

// # Safety
// `report` must come from [`ht_gof_run`] and not be used afterwards.
void ht_gof_report_free(struct HtGofReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HEAVYTAIL_H */
