/*
 * Copyright 2026 The relaysel Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface to librelaysel: analysis, optimization, Monte Carlo and
 * protocol traces for splitting-based selection of the best Q of n nodes.
 *
 * Every fallible call returns an rsel_status. On failure the output
 * arguments are untouched and rsel_last_error() describes the problem; the
 * message is per thread and stays valid until the next failing call on that
 * thread. Objects returned through a `**out` argument are owned by the
 * caller and released with the matching *_destroy function, which accepts
 * NULL.
 */

#ifndef RELAYSEL_H
#define RELAYSEL_H

#include <stddef.h>
#include <stdint.h>

#if defined(RSEL_BUILDING_LIBRARY)
#define RSEL_API __attribute__((visibility("default")))
#else
#define RSEL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rsel_status {
  RSEL_OK = 0,
  RSEL_ERR_INVALID_ARGUMENT = 1, /* a precondition on an argument failed */
  RSEL_ERR_NOT_CONVERGED = 2,    /* a series hit its term cap before its tolerance */
  RSEL_ERR_RUNTIME = 3,          /* e.g. a protocol run exceeded its slot budget */
  RSEL_ERR_NULL = 4              /* a required pointer argument was NULL */
} rsel_status;

RSEL_API const char* rsel_last_error(void);
RSEL_API const char* rsel_version(void);

/* Series truncation. Pass NULL wherever an rsel_series is accepted to use
 * the defaults (tol 1e-12, 200 terms). */
typedef struct rsel_series {
  double tol;
  int max_terms;
} rsel_series;

RSEL_API rsel_series rsel_series_default(void);

/* ---- analysis --------------------------------------------------------- */

/* E_k^[q]: expected slots to finish selecting q nodes after k collide. */
RSEL_API rsel_status rsel_collision_slots(size_t k, unsigned q, double pe, const rsel_series* ctl, double* out);
/* Exact single-node average for n nodes (0 < pe <= n). */
RSEL_API rsel_status rsel_avg_slots_finite(size_t n, double pe, double* out);
/* Asymptotic average to select the best q nodes, recursive series. */
RSEL_API rsel_status rsel_avg_slots(unsigned q, double pe, const rsel_series* ctl, double* out);
/* Asymptotic average from the Markov-chain series; q must be 1 or 2. */
RSEL_API rsel_status rsel_avg_slots_markov(unsigned q, double pe, const rsel_series* ctl, double* out);
/* Series kept to `terms` terms (lower bounds). */
RSEL_API rsel_status rsel_avg_slots_truncated(unsigned q, double pe, int terms, double* out);
RSEL_API rsel_status rsel_avg_slots_markov_truncated(unsigned q, double pe, int terms, double* out);
/* Closed-form upper bound for q = 1; k0 >= e/2. */
RSEL_API rsel_status rsel_upper_bound(double pe, double k0, double* out);
/* q / average slots. */
RSEL_API rsel_status rsel_throughput(unsigned q, double pe, const rsel_series* ctl, double* out);

/* ---- optimization ----------------------------------------------------- */

typedef struct rsel_optimum {
  unsigned q;
  double pe_star;
  double m_star;
  double improvement; /* fraction; 0 for q = 1 */
  int grid_fallback;  /* 1 if the objective was not unimodal on the bracket */
} rsel_optimum;

RSEL_API rsel_status rsel_optimal_pe(unsigned q, double low, double high, double xtol, const rsel_series* ctl,
                                     rsel_optimum* out);
RSEL_API rsel_status rsel_greedy_gap(unsigned q, const rsel_series* ctl, double* out);

typedef struct rsel_table rsel_table;
RSEL_API rsel_status rsel_table_create(unsigned q_max, const rsel_series* ctl, rsel_table** out);
RSEL_API size_t rsel_table_size(const rsel_table* table);
RSEL_API rsel_status rsel_table_row(const rsel_table* table, size_t index, rsel_optimum* out);
RSEL_API void rsel_table_destroy(rsel_table* table);

/* ---- Monte Carlo ------------------------------------------------------ */

typedef struct rsel_summary {
  double mean_slots;
  double std_error;
  double ci95_half_width;
  uint64_t trials;
  uint64_t seed;
} rsel_summary;

/* workers = 0 uses the hardware concurrency; results never depend on it. */
RSEL_API rsel_status rsel_estimate(size_t n, unsigned q, double pe, uint64_t trials, uint64_t seed, unsigned workers,
                                   rsel_summary* out);

/* Discrete metric pmf over levels 1..count. */
typedef struct rsel_pmf rsel_pmf;
RSEL_API rsel_status rsel_pmf_create(const double* probabilities, size_t count, rsel_pmf** out);
/* Comma-separated list, e.g. "0.2,0.5,0.3". */
RSEL_API rsel_status rsel_pmf_parse(const char* text, rsel_pmf** out);
RSEL_API size_t rsel_pmf_levels(const rsel_pmf* pmf);
RSEL_API void rsel_pmf_destroy(rsel_pmf* pmf);

RSEL_API rsel_status rsel_estimate_discrete(const rsel_pmf* pmf, size_t n, unsigned q, double pe, uint64_t trials,
                                            uint64_t seed, unsigned workers, rsel_summary* out);

typedef struct rsel_sweep_point {
  int has_n; /* 0: asymptotic only, no simulation */
  size_t n;
  unsigned q;
  double pe;
} rsel_sweep_point;

typedef struct rsel_sweep_row {
  rsel_sweep_point point;
  double analytic;
  int has_simulation;
  rsel_summary simulated;
} rsel_sweep_row;

typedef struct rsel_sweep rsel_sweep;
RSEL_API rsel_status rsel_sweep_run(const rsel_sweep_point* points, size_t count, uint64_t trials, uint64_t seed,
                                    const rsel_series* ctl, unsigned workers, rsel_sweep** out);
RSEL_API size_t rsel_sweep_size(const rsel_sweep* sweep);
RSEL_API rsel_status rsel_sweep_row_get(const rsel_sweep* sweep, size_t index, rsel_sweep_row* out);
RSEL_API void rsel_sweep_destroy(rsel_sweep* sweep);

/* ---- protocol --------------------------------------------------------- */

typedef struct rsel_trace_record {
  size_t slot_index;
  double interval_start;
  double interval_width;
  char sigma;    /* 'L' or 'R' */
  char feedback; /* '0' idle, '1' success, 'e' collision */
  size_t selected_count;
} rsel_trace_record;

/* Draws n normalized metrics for trial 0 of `seed` into y_out[0..n-1]:
 * uniform on (0, n), or Proportional Expansion of pmf levels if pmf != NULL. */
RSEL_API rsel_status rsel_sample_normalized(size_t n, uint64_t seed, const rsel_pmf* pmf, double* y_out);

typedef struct rsel_run rsel_run;
/* Runs the Q-node algorithm on y[0..n-1] (values in (0, n), distinct). */
RSEL_API rsel_status rsel_run_qselect(const double* y, size_t n, double pe, unsigned q, rsel_run** out);
/* Runs the single-node threshold algorithm on the same normalized input. */
RSEL_API rsel_status rsel_run_single(const double* y, size_t n, double pe, rsel_run** out);
RSEL_API size_t rsel_run_slots(const rsel_run* run);
RSEL_API size_t rsel_run_selected_count(const rsel_run* run);
RSEL_API size_t rsel_run_selected(const rsel_run* run, size_t index);
RSEL_API size_t rsel_run_trace_size(const rsel_run* run);
RSEL_API rsel_status rsel_run_trace_record(const rsel_run* run, size_t index, rsel_trace_record* out);
RSEL_API void rsel_run_destroy(rsel_run* run);

#ifdef __cplusplus
}
#endif

#endif /* RELAYSEL_H */
