#ifndef HOLDERFORMS_H
#define HOLDERFORMS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HfStatus {
  HF_STATUS_OK = 0,
  HF_STATUS_NULL_POINTER = 1,
  HF_STATUS_INVALID_ARGUMENT = 2,
  HF_STATUS_UNDER_RESOLVED = 3,
  HF_STATUS_NON_CONVERGENT = 4,
  HF_STATUS_OUTSIDE_DOMAIN = 5,
  HF_STATUS_EPSILON_TOO_LARGE = 6,
  HF_STATUS_AMBIGUOUS_MODULUS = 7,
  HF_STATUS_DIMENSION_HYPOTHESIS = 8,
  HF_STATUS_INCONSISTENT = 9,
  HF_STATUS_PARSE = 10,
  HF_STATUS_IO = 11,
  HF_STATUS_CONFIG = 12,
  HF_STATUS_PANIC = 13,
} HfStatus;

/**
 * Opaque sampled field.
 */
typedef struct HfGridField HfGridField;

typedef struct HfHolderEstimate {
  double theta;
  double seminorm;
  double supnorm;
  double cnorm;
  uint64_t pairs;
} HfHolderEstimate;

/**
 * Absent rates are NaN.
 */
typedef struct HfSpectralRates {
  double lambda_u;
  double m_u;
  double lambda_s;
  double m_s;
  double m_c;
  double big_m_c;
  size_t dim_s;
  size_t dim_c;
  size_t dim_u;
} HfSpectralRates;

typedef struct HfCriterion {
  double value;
  bool holds;
  double theta;
  double theta_threshold;
  bool threshold_reachable;
} HfCriterion;

typedef struct HfPisot {
  double xi;
  double eta;
  double det_residual;
  double poly_residual;
  double accessibility_threshold;
  double standard_bound;
} HfPisot;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the
 * next call into the library from the same thread.
 */
const char *hf_last_error_message(void);

/**
 * Truncated Weierstrass series on the periodic unit interval.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum HfStatus hf_weierstrass_new(double theta,
                                 uint32_t base,
                                 uint32_t terms,
                                 size_t resolution,
                                 struct HfGridField **out);

/**
 * A 1D field from `nodes` samples on `[lo, hi]`. Periodic fields repeat the
 * first sample as the last.
 *
 * # Safety
 * `values` must point to `nodes` doubles; `out` must be valid for writes.
 */
enum HfStatus hf_grid_field_new_1d(double lo,
                                   double hi,
                                   bool periodic,
                                   const double *values,
                                   size_t nodes,
                                   struct HfGridField **out);

/**
 * Releases a handle. NULL is a no-op.
 *
 * # Safety
 * `field` must come from this library and not be used afterwards.
 */
void hf_grid_field_free(struct HfGridField *field);

/**
 * Number of samples.
 *
 * # Safety
 * `field` must be a live handle; `out` valid for writes.
 */
enum HfStatus hf_grid_field_len(const struct HfGridField *field, size_t *out);

/**
 * Copies the samples, row-major, into `buf`. Fails unless `len` equals the
 * field's length.
 *
 * # Safety
 * `field` must be a live handle; `buf` must hold `len` doubles.
 */
enum HfStatus hf_grid_field_values(const struct HfGridField *field, double *buf, size_t len);

/**
 * # Safety
 * `field` must be a live handle; `out` valid for writes.
 */
enum HfStatus hf_holder_seminorm(const struct HfGridField *field,
                                 double theta,
                                 struct HfHolderEstimate *out);

/**
 * # Safety
 * `field` must be a live handle; `out` valid for writes.
 */
enum HfStatus hf_c_theta_norm(const struct HfGridField *field,
                              double theta,
                              struct HfHolderEstimate *out);

/**
 * Mollified copy of `field` as a new handle.
 *
 * # Safety
 * `field` must be a live handle; `out` valid for writes.
 */
enum HfStatus hf_mollify(const struct HfGridField *field, double epsilon, struct HfGridField **out);

/**
 * Rates of `A × id` on `T^{n+extra}` for the `n×n` matrix with row-major
 * `entries` (`len = n²`).
 *
 * # Safety
 * `entries` must hold `len` values; `out` valid for writes.
 */
enum HfStatus hf_spectral_rates(const int64_t *entries,
                                size_t len,
                                size_t extra_center_dims,
                                struct HfSpectralRates *out);

/**
 * # Safety
 * `rates` must be readable; `out` valid for writes.
 */
enum HfStatus hf_anosov_section_criterion(const struct HfSpectralRates *rates,
                                          double theta,
                                          struct HfCriterion *out);

/**
 * # Safety
 * `rates` must be readable; `out` valid for writes.
 */
enum HfStatus hf_accessibility_criterion(const struct HfSpectralRates *rates,
                                         double theta,
                                         size_t ell,
                                         struct HfCriterion *out);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum HfStatus hf_pisot_example(struct HfPisot *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HOLDERFORMS_H */
