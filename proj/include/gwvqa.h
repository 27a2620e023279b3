/* gwvqa: matched-filter quality grids and statevector variational search.
 *
 * Every handle is opaque and owned by the caller once returned; release it with
 * the matching *_free function (NULL is accepted). Functions returning
 * gwvqa_status leave outputs untouched on failure and record a message that
 * gwvqa_last_error() returns for the calling thread. */
#ifndef GWVQA_H
#define GWVQA_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(GWVQA_BUILDING)
#    define GWVQA_API __declspec(dllexport)
#  else
#    define GWVQA_API __declspec(dllimport)
#  endif
#else
#  define GWVQA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gwvqa_status {
  GWVQA_OK = 0,
  GWVQA_INVALID_ARGUMENT = 1,
  GWVQA_EMPTY_SEGMENTATION = 2,
  GWVQA_INSUFFICIENT_DATA = 3,
  GWVQA_FREQUENCY_RANGE = 4,
  GWVQA_BAND_EMPTY = 5,
  GWVQA_BAND_ERROR = 6,
  GWVQA_NORMALIZATION_ERROR = 7,
  GWVQA_UNPHYSICAL_COORDINATES = 8,
  GWVQA_DOMAIN_ERROR = 9,
  GWVQA_ALIGNMENT_ERROR = 10,
  GWVQA_DIMENSION_ERROR = 11,
  GWVQA_ARITY_ERROR = 12,
  GWVQA_NO_MARKED_STATES = 13,
  GWVQA_TYPE_ERROR = 14,
  GWVQA_EVALUATION_ERROR = 15,
  GWVQA_CONFIG_ERROR = 16,
  GWVQA_DATA_ERROR = 17,
  GWVQA_IO_ERROR = 18,
  GWVQA_INTERNAL = 19
} gwvqa_status;

typedef struct gwvqa_config gwvqa_config;
typedef struct gwvqa_timeseries gwvqa_timeseries;
typedef struct gwvqa_psd gwvqa_psd;
typedef struct gwvqa_template gwvqa_template;
typedef struct gwvqa_quality gwvqa_quality;
typedef struct gwvqa_state gwvqa_state;
typedef struct gwvqa_results gwvqa_results;

GWVQA_API const char* gwvqa_version(void);
GWVQA_API const char* gwvqa_status_name(gwvqa_status status);
/* Message of the last failure on this thread; empty after a success. */
GWVQA_API const char* gwvqa_last_error(void);

/* ---- configuration ------------------------------------------------------ */

/* preset may be NULL for "default". */
GWVQA_API gwvqa_status gwvqa_config_new(const char* preset, gwvqa_config** out);
GWVQA_API void gwvqa_config_free(gwvqa_config* cfg);
/* Keys as in the config file (`grid`, `rho0`, `depths`, ...); '-' and '_' are
 * interchangeable. Setting `preset` resets all other keys. */
GWVQA_API gwvqa_status gwvqa_config_set(gwvqa_config* cfg, const char* key, const char* value);
/* Writes the effective configuration as `key = value` lines. `needed` receives
 * the full length including the terminator; output is truncated to cap. */
GWVQA_API gwvqa_status gwvqa_config_describe(const gwvqa_config* cfg, char* buf, size_t cap,
                                             size_t* needed);
/* Effective value of one key, formatted as in gwvqa_config_describe. */
GWVQA_API gwvqa_status gwvqa_config_get(const gwvqa_config* cfg, const char* key, char* buf,
                                        size_t cap, size_t* needed);
/* Materializes the configured strain (file or synthetic) and its filtering PSD. */
GWVQA_API gwvqa_status gwvqa_config_load_data(const gwvqa_config* cfg, gwvqa_timeseries** series,
                                              gwvqa_psd** psd);

/* ---- time series -------------------------------------------------------- */

GWVQA_API gwvqa_status gwvqa_timeseries_new(const double* samples, size_t n, double f_s,
                                            double t0, gwvqa_timeseries** out);
GWVQA_API gwvqa_status gwvqa_timeseries_read(const char* path, gwvqa_timeseries** out);
/* Writes `{base}.json` + `{base}.bin`, or a CSV when base ends in ".csv". */
GWVQA_API gwvqa_status gwvqa_timeseries_write(const gwvqa_timeseries* ts, const char* base,
                                              const char* detector);
GWVQA_API size_t gwvqa_timeseries_size(const gwvqa_timeseries* ts);
GWVQA_API double gwvqa_timeseries_sample_rate(const gwvqa_timeseries* ts);
GWVQA_API const double* gwvqa_timeseries_data(const gwvqa_timeseries* ts);
GWVQA_API void gwvqa_timeseries_free(gwvqa_timeseries* ts);

/* ---- PSD ---------------------------------------------------------------- */

/* method: "median" or "mean". */
GWVQA_API gwvqa_status gwvqa_psd_estimate(const gwvqa_timeseries* ts, double seg_seconds,
                                          double overlap_frac, const char* method,
                                          gwvqa_psd** out);
GWVQA_API gwvqa_status gwvqa_psd_condition(const gwvqa_psd* psd, size_t n, double f_s,
                                           double f_low, gwvqa_psd** out);
GWVQA_API gwvqa_status gwvqa_psd_read(const char* path, gwvqa_psd** out);
GWVQA_API gwvqa_status gwvqa_psd_write(const gwvqa_psd* psd, const char* path);
GWVQA_API size_t gwvqa_psd_size(const gwvqa_psd* psd);
GWVQA_API double gwvqa_psd_delta_f(const gwvqa_psd* psd);
GWVQA_API const double* gwvqa_psd_values(const gwvqa_psd* psd);
GWVQA_API void gwvqa_psd_free(gwvqa_psd* psd);

/* ---- templates and matched filtering ------------------------------------ */

GWVQA_API gwvqa_status gwvqa_template_new(double m1, double m2, size_t n, double f_s,
                                          const gwvqa_psd* psd, double f_low,
                                          gwvqa_template** out);
GWVQA_API gwvqa_status gwvqa_template_band(const gwvqa_template* t, size_t* k_lo, size_t* k_hi);
GWVQA_API gwvqa_status gwvqa_template_write_csv(const gwvqa_template* t, const char* path);
GWVQA_API void gwvqa_template_free(gwvqa_template* t);

GWVQA_API gwvqa_status gwvqa_snr_at(const gwvqa_template* t, const gwvqa_timeseries* data,
                                    const gwvqa_psd* psd, double t_c, double* rho);
/* rho(t_c) for t_c = n / f_s, n = 0..N-1; `out` must hold N values. */
GWVQA_API gwvqa_status gwvqa_snr_series(const gwvqa_template* t, const gwvqa_timeseries* data,
                                        const gwvqa_psd* psd, double* out, size_t cap);

/* ---- quality grids ------------------------------------------------------ */

/* Evaluates (or loads from the cache) the configured quality grid. */
GWVQA_API gwvqa_status gwvqa_quality_from_config(const gwvqa_config* cfg, gwvqa_quality** out);
GWVQA_API gwvqa_status gwvqa_quality_read(const char* base, gwvqa_quality** out);
GWVQA_API gwvqa_status gwvqa_quality_write(const gwvqa_quality* q, const char* base);
GWVQA_API gwvqa_status gwvqa_quality_dims(const gwvqa_quality* q, size_t* j1, size_t* j2);
GWVQA_API const double* gwvqa_quality_values(const gwvqa_quality* q);
GWVQA_API size_t gwvqa_quality_count_above(const gwvqa_quality* q, double rho0);
/* Chart coordinates of grid point j = j1 * J2 + j2. */
GWVQA_API gwvqa_status gwvqa_quality_point(const gwvqa_quality* q, size_t j, double* x1, double* x2);
GWVQA_API void gwvqa_quality_free(gwvqa_quality* q);

/* ---- statevector primitives --------------------------------------------- */

/* mixer family names: "hypercube", "complete", "complete-per-dim", "cycle-per-dim". */
GWVQA_API gwvqa_status gwvqa_state_uniform(size_t j1, size_t j2, gwvqa_state** out);
GWVQA_API gwvqa_status gwvqa_state_phase(gwvqa_state* s, double gamma, const double* f, size_t n);
GWVQA_API gwvqa_status gwvqa_state_mixer(gwvqa_state* s, const char* family, const double* times,
                                         size_t n_times);
GWVQA_API gwvqa_status gwvqa_state_expectation(const gwvqa_state* s, const double* f, size_t n,
                                               double* out);
GWVQA_API gwvqa_status gwvqa_state_probabilities(const gwvqa_state* s, double* out, size_t n);
GWVQA_API size_t gwvqa_state_size(const gwvqa_state* s);
GWVQA_API void gwvqa_state_free(gwvqa_state* s);

GWVQA_API double gwvqa_grover_closed_form(size_t J, size_t marked, unsigned p);
/* RDGS on 2^q points with `marked` points spread evenly. */
GWVQA_API gwvqa_status gwvqa_rdgs_synthetic(unsigned q, size_t marked, unsigned p,
                                            double* simulated, double* closed_form);
/* RDGS on the configured quality grid. */
GWVQA_API gwvqa_status gwvqa_rdgs_experiment(const gwvqa_config* cfg, unsigned p,
                                             double* simulated, double* closed_form,
                                             size_t* J, size_t* marked);

/* ---- experiments -------------------------------------------------------- */

typedef struct gwvqa_row {
  const char* chart;
  const char* variant;
  unsigned q1;
  unsigned q2;
  unsigned depth;
  size_t marked;
  size_t n_repeats;
  double mean_expectation;
  double std_expectation;
  double mean_success;
  double std_success;
  double mean_iters;
  double mean_wall_s;
} gwvqa_row;

/* Runs the configured sweep and writes its artifacts to the output directory. */
GWVQA_API gwvqa_status gwvqa_run_experiment(const gwvqa_config* cfg, gwvqa_results** out);
GWVQA_API size_t gwvqa_results_count(const gwvqa_results* r);
/* Strings in `row` stay valid while `r` lives. */
GWVQA_API gwvqa_status gwvqa_results_row(const gwvqa_results* r, size_t i, gwvqa_row* row);
GWVQA_API void gwvqa_results_free(gwvqa_results* r);

/* Data / signal-part / residual quality grids for the template of (m1, m2). */
GWVQA_API gwvqa_status gwvqa_run_decomposition(const gwvqa_config* cfg, double m1, double m2,
                                               double* coefficient_re, double* coefficient_im);
/* Synthesizes the configured injection into `{base}.json/.bin` plus `{base}-psd.csv`. */
GWVQA_API gwvqa_status gwvqa_inject(const gwvqa_config* cfg, const char* base);
/* Re-renders plots in `dir` and returns a text summary (see config_describe). */
GWVQA_API gwvqa_status gwvqa_report(const char* dir, char* buf, size_t cap, size_t* needed);

#ifdef __cplusplus
}
#endif

#endif /* GWVQA_H */
