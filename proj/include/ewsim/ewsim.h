/*
 * ewsim C API.
 *
 * Opaque handles own their data and must be released with the matching
 * *_free function. Every fallible call returns an ewsim_status; on failure
 * ewsim_last_error() describes the problem (thread-local, valid until the
 * next API call on the same thread).
 */
#ifndef EWSIM_H
#define EWSIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(EWSIM_BUILDING)
#    define EWSIM_API __declspec(dllexport)
#  else
#    define EWSIM_API __declspec(dllimport)
#  endif
#else
#  define EWSIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ewsim_status {
  EWSIM_OK = 0,
  EWSIM_ERR_INVALID_ARGUMENT = 1,
  EWSIM_ERR_PARSE = 2,
  EWSIM_ERR_DATA = 3,
  EWSIM_ERR_CONFIG = 4,
  EWSIM_ERR_IO = 5,
  EWSIM_ERR_INTERNAL = 99
} ewsim_status;

typedef enum ewsim_frequency {
  EWSIM_MONTHLY = 0,
  EWSIM_QUARTERLY = 1,
  EWSIM_SEMIANNUAL = 2
} ewsim_frequency;

typedef enum ewsim_series {
  EWSIM_SERIES_EW_RELATIVE = 0,      /* EW vs cap-weighted full market, log */
  EWSIM_SERIES_EW_TOPN_VS_CW_TOPN = 1,
  EWSIM_SERIES_TURNOVER = 2,
  EWSIM_SERIES_SIZE_EXPOSURE = 3,
  EWSIM_SERIES_LEAKAGE = 4,
  EWSIM_SERIES_PREMIUM_ESTIMATE = 5,
  EWSIM_SERIES_TRADING_PROFIT = 6
} ewsim_series;

typedef struct ewsim_history ewsim_history;
typedef struct ewsim_run ewsim_run;
typedef struct ewsim_grid ewsim_grid;

typedef struct ewsim_synthetic_spec {
  size_t n_assets;
  int horizon_years;
  int periods_per_year; /* multiple of 12, at most 336 */
  double vol;           /* annualized log-volatility, all assets */
  double drift;         /* annualized log-drift, all assets */
  double correlation;   /* [0, 1) */
  uint64_t seed;
  int start_year;
} ewsim_synthetic_spec;

typedef struct ewsim_run_params {
  size_t top_n; /* 0 selects every member */
  ewsim_frequency frequency;
  unsigned month_offset;
  double tc_bps;
  double calibration_factor;
} ewsim_run_params;

EWSIM_API const char* ewsim_version(void);
EWSIM_API const char* ewsim_status_name(ewsim_status status);
EWSIM_API const char* ewsim_last_error(void);

EWSIM_API void ewsim_synthetic_spec_init(ewsim_synthetic_spec* spec);
/* monthly, offset 0, no costs, factor 0, all members */
EWSIM_API void ewsim_run_params_init(ewsim_run_params* params);

EWSIM_API ewsim_status ewsim_history_load_csv(const char* path, ewsim_history** out);
EWSIM_API ewsim_status ewsim_history_generate(const ewsim_synthetic_spec* spec, ewsim_history** out);
EWSIM_API ewsim_status ewsim_history_write_csv(const ewsim_history* history, const char* path);
EWSIM_API size_t ewsim_history_num_days(const ewsim_history* history);
EWSIM_API size_t ewsim_history_num_securities(const ewsim_history* history);
EWSIM_API void ewsim_history_free(ewsim_history* history);

EWSIM_API ewsim_status ewsim_simulate(const ewsim_history* history, const ewsim_run_params* params, ewsim_run** out);
EWSIM_API size_t ewsim_run_length(const ewsim_run* run);
EWSIM_API size_t ewsim_run_num_trades(const ewsim_run* run);
/* Copies one calendar-aligned series into out[0..capacity). capacity must be >= ewsim_run_length. */
EWSIM_API ewsim_status ewsim_run_series(const ewsim_run* run, ewsim_series series, double* out, size_t capacity);
/* Annualized mean and stdev in % per year (turnover: yearly sums averaged). */
EWSIM_API ewsim_status ewsim_run_stats(const ewsim_run* run, ewsim_series series, int periods_per_year, double* mean,
                                       double* stdev);
/* Writes relative.csv, profit.csv, decomposition.csv, turnover.csv and trades.csv into dir. */
EWSIM_API ewsim_status ewsim_run_write(const ewsim_run* run, const char* dir);
EWSIM_API void ewsim_run_free(ewsim_run* run);

/* Attribution of an external trade log (trade CSV in, `date,trading_profit` CSV out). */
EWSIM_API ewsim_status ewsim_attribute_csv(const char* trades_path, double tc_bps, const char* out_path);

/* Runs the experiment grid of a config file. out_dir and seed may be NULL to keep the config's values. */
EWSIM_API ewsim_status ewsim_grid_run(const char* config_path, const char* out_dir, const uint64_t* seed,
                                      ewsim_grid** out);
EWSIM_API const char* ewsim_grid_output_dir(const ewsim_grid* grid);
EWSIM_API size_t ewsim_grid_num_cells(const ewsim_grid* grid);
EWSIM_API const char* ewsim_grid_cell_name(const ewsim_grid* grid, size_t index);
/* Plain-text summary table of one cell; NULL when index is out of range. */
EWSIM_API const char* ewsim_grid_cell_summary(const ewsim_grid* grid, size_t index);
EWSIM_API void ewsim_grid_free(ewsim_grid* grid);

#ifdef __cplusplus
}
#endif

#endif /* EWSIM_H */
