#ifndef QTELE_H
#define QTELE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QteleStatus {
  QTELE_STATUS_OK = 0,
  QTELE_STATUS_NULL_POINTER = 1,
  QTELE_STATUS_INVALID_UTF8 = 2,
  QTELE_STATUS_CONFIG_ERROR = 3,
  QTELE_STATUS_SIMULATION_ERROR = 4,
  QTELE_STATUS_PANIC = 5,
} QteleStatus;

/**
 * Opaque experiment configuration.
 */
typedef struct QteleConfig QteleConfig;

/**
 * Opaque result of a simulated run.
 */
typedef struct QteleReport QteleReport;

typedef struct QteleHoeffding {
  double p_bound;
  double p_ln;
  /**
   * `p = p_mantissa · 10^p_exponent10`.
   */
  double p_mantissa;
  int32_t p_exponent10;
} QteleHoeffding;

typedef struct QteleTimeline {
  double photon_release_ns;
  double signal_arrival_ns;
  double slack_ns;
  bool feasible;
} QteleTimeline;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer is
 * valid until the next API call on the same thread.
 */
const char *qtele_last_error_message(void);

/**
 * Built-in default configuration. Free with `qtele_config_free`.
 */
struct QteleConfig *qtele_config_default(void);

/**
 * Parses and validates a TOML configuration.
 *
 * # Safety
 * `toml` must be a NUL-terminated string; `out` must be writable.
 */
enum QteleStatus qtele_config_from_toml(const char *toml, struct QteleConfig **out);

/**
 * # Safety
 * `cfg` must come from this library and not be used afterwards.
 */
void qtele_config_free(struct QteleConfig *cfg);

/**
 * # Safety
 * `cfg` must be a live handle.
 */
enum QteleStatus qtele_config_set_seed(struct QteleConfig *cfg, uint64_t seed);

/**
 * Runs the simulated experiment on `workers` threads (0 means 1).
 *
 * # Safety
 * `cfg` must be a live handle; `out` must be writable.
 */
enum QteleStatus qtele_run(const struct QteleConfig *cfg,
                           uint32_t workers,
                           struct QteleReport **out);

/**
 * # Safety
 * `report` must come from this library and not be used afterwards.
 */
void qtele_report_free(struct QteleReport *report);

/**
 * Serializes the report as JSON. Free the string with `qtele_string_free`.
 *
 * # Safety
 * `report` must be a live handle; `out` must be writable.
 */
enum QteleStatus qtele_report_to_json(const struct QteleReport *report, char **out);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void qtele_string_free(char *s);

/**
 * # Safety
 * `report` must be a live handle; `out` must be writable.
 */
enum QteleStatus qtele_report_average_fidelity(const struct QteleReport *report, double *out);

/**
 * # Safety
 * `report` must be a live handle; `out` must be writable.
 */
enum QteleStatus qtele_report_process_fidelity(const struct QteleReport *report, double *out);

/**
 * Classical-bound p-value for mean fidelity over `trials_per_state` trials
 * per input state.
 *
 * # Safety
 * `out` must be writable.
 */
enum QteleStatus qtele_hoeffding(double mean_fidelity,
                                 uint64_t trials_per_state,
                                 struct QteleHoeffding *out);

/**
 * # Safety
 * `cfg` must be a live handle; `out` must be writable.
 */
enum QteleStatus qtele_timeline(const struct QteleConfig *cfg, struct QteleTimeline *out);

/**
 * Four-fold coincidences per hour from the itemized budget.
 *
 * # Safety
 * `cfg` must be a live handle; `out` must be writable.
 */
enum QteleStatus qtele_rate_per_hour(const struct QteleConfig *cfg, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QTELE_H */
