// Copyright 2026 The relaysel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "relaysel/relaysel.h"

#include <exception>
#include <memory>
#include <new>
#include <stdexcept>
#include <string>
#include <vector>

#include "relaysel/analysis.hpp"
#include "relaysel/metrics.hpp"
#include "relaysel/montecarlo.hpp"
#include "relaysel/optimize.hpp"
#include "relaysel/protocol.hpp"

struct rsel_table {
  std::vector<relaysel::OptimumRow> rows;
};

struct rsel_pmf {
  relaysel::DiscreteMetricModel model;
};

struct rsel_sweep {
  std::vector<relaysel::SweepRow> rows;
};

struct rsel_run {
  std::vector<std::size_t> selected;
  std::size_t slots = 0;
  relaysel::Transcript trace;
};

namespace {

thread_local std::string g_last_error;

rsel_status fail(rsel_status code, const char* what) {
  g_last_error = what;
  return code;
}

template <class Fn>
rsel_status guarded(Fn&& fn) {
  try {
    fn();
    return RSEL_OK;
  } catch (const relaysel::ConvergenceError& e) {
    return fail(RSEL_ERR_NOT_CONVERGED, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(RSEL_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::out_of_range& e) {
    return fail(RSEL_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(RSEL_ERR_RUNTIME, "out of memory");
  } catch (const std::exception& e) {
    return fail(RSEL_ERR_RUNTIME, e.what());
  } catch (...) {
    return fail(RSEL_ERR_RUNTIME, "unknown error");
  }
}

rsel_status null_arg(const char* name) {
  g_last_error = std::string(name) + " must not be NULL";
  return RSEL_ERR_NULL;
}

relaysel::SeriesControl control(const rsel_series* ctl) {
  relaysel::SeriesControl c;
  if (ctl) {
    c.tol = ctl->tol;
    c.max_terms = ctl->max_terms;
  }
  return c;
}

rsel_summary to_c(const relaysel::SummaryStats& s) {
  return rsel_summary{s.mean_slots, s.std_error, s.ci95_half_width, s.trials, s.seed};
}

rsel_optimum to_c(const relaysel::OptimumRow& r) {
  return rsel_optimum{r.q, r.pe_star, r.m_star, r.improvement, r.grid_fallback ? 1 : 0};
}

relaysel::NormalizedMetrics copy_metrics(const double* y, std::size_t n) {
  return relaysel::NormalizedMetrics(std::vector<double>(y, y + n));
}

}  // namespace

extern "C" {

const char* rsel_last_error(void) { return g_last_error.c_str(); }

const char* rsel_version(void) { return "1.0.0"; }

rsel_series rsel_series_default(void) {
  const relaysel::SeriesControl c;
  return rsel_series{c.tol, c.max_terms};
}

rsel_status rsel_collision_slots(size_t k, unsigned q, double pe, const rsel_series* ctl, double* out) {
  if (!out) return null_arg("out");
  return guarded([&] { *out = relaysel::collision_slots_q(k, q, pe, control(ctl)); });
}

rsel_status rsel_avg_slots_finite(size_t n, double pe, double* out) {
  if (!out) return null_arg("out");
  return guarded([&] { *out = relaysel::avg_slots_finite(n, pe); });
}

rsel_status rsel_avg_slots(unsigned q, double pe, const rsel_series* ctl, double* out) {
  if (!out) return null_arg("out");
  return guarded([&] { *out = relaysel::avg_slots_q_recursive(q, pe, control(ctl)); });
}

rsel_status rsel_avg_slots_markov(unsigned q, double pe, const rsel_series* ctl, double* out) {
  if (!out) return null_arg("out");
  return guarded([&] {
    const auto c = control(ctl);
    if (q == 1)
      *out = relaysel::avg_slots_asym_markov(pe, c);
    else if (q == 2)
      *out = relaysel::avg_slots_q2_markov(pe, c);
    else
      throw std::invalid_argument("Markov form is available for Q = 1 and Q = 2 only");
  });
}

rsel_status rsel_avg_slots_truncated(unsigned q, double pe, int terms, double* out) {
  if (!out) return null_arg("out");
  return guarded([&] { *out = relaysel::avg_slots_recursive_truncated(q, pe, terms); });
}

rsel_status rsel_avg_slots_markov_truncated(unsigned q, double pe, int terms, double* out) {
  if (!out) return null_arg("out");
  return guarded([&] { *out = relaysel::avg_slots_markov_truncated(q, pe, terms); });
}

rsel_status rsel_upper_bound(double pe, double k0, double* out) {
  if (!out) return null_arg("out");
  return guarded([&] { *out = relaysel::upper_bound(pe, k0); });
}

rsel_status rsel_throughput(unsigned q, double pe, const rsel_series* ctl, double* out) {
  if (!out) return null_arg("out");
  return guarded([&] { *out = relaysel::throughput(q, pe, control(ctl)); });
}

rsel_status rsel_optimal_pe(unsigned q, double low, double high, double xtol, const rsel_series* ctl,
                            rsel_optimum* out) {
  if (!out) return null_arg("out");
  return guarded([&] { *out = to_c(relaysel::optimal_pe(q, relaysel::Bracket{low, high}, xtol, control(ctl))); });
}

rsel_status rsel_greedy_gap(unsigned q, const rsel_series* ctl, double* out) {
  if (!out) return null_arg("out");
  return guarded([&] { *out = relaysel::greedy_gap(q, control(ctl)); });
}

rsel_status rsel_table_create(unsigned q_max, const rsel_series* ctl, rsel_table** out) {
  if (!out) return null_arg("out");
  return guarded([&] { *out = new rsel_table{relaysel::table1(q_max, control(ctl))}; });
}

size_t rsel_table_size(const rsel_table* table) { return table ? table->rows.size() : 0; }

rsel_status rsel_table_row(const rsel_table* table, size_t index, rsel_optimum* out) {
  if (!table) return null_arg("table");
  if (!out) return null_arg("out");
  if (index >= table->rows.size()) return fail(RSEL_ERR_INVALID_ARGUMENT, "table row index out of range");
  *out = to_c(table->rows[index]);
  return RSEL_OK;
}

void rsel_table_destroy(rsel_table* table) { delete table; }

rsel_status rsel_estimate(size_t n, unsigned q, double pe, uint64_t trials, uint64_t seed, unsigned workers,
                          rsel_summary* out) {
  if (!out) return null_arg("out");
  return guarded([&] { *out = to_c(relaysel::estimate(n, q, pe, trials, seed, relaysel::RunOptions{workers})); });
}

rsel_status rsel_pmf_create(const double* probabilities, size_t count, rsel_pmf** out) {
  if (!probabilities) return null_arg("probabilities");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new rsel_pmf{relaysel::DiscreteMetricModel(std::vector<double>(probabilities, probabilities + count))};
  });
}

rsel_status rsel_pmf_parse(const char* text, rsel_pmf** out) {
  if (!text) return null_arg("text");
  if (!out) return null_arg("out");
  return guarded([&] { *out = new rsel_pmf{relaysel::DiscreteMetricModel::parse(text)}; });
}

size_t rsel_pmf_levels(const rsel_pmf* pmf) { return pmf ? pmf->model.levels() : 0; }

void rsel_pmf_destroy(rsel_pmf* pmf) { delete pmf; }

rsel_status rsel_estimate_discrete(const rsel_pmf* pmf, size_t n, unsigned q, double pe, uint64_t trials,
                                   uint64_t seed, unsigned workers, rsel_summary* out) {
  if (!pmf) return null_arg("pmf");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = to_c(relaysel::estimate_discrete(pmf->model, n, q, pe, trials, seed, relaysel::RunOptions{workers}));
  });
}

rsel_status rsel_sweep_run(const rsel_sweep_point* points, size_t count, uint64_t trials, uint64_t seed,
                           const rsel_series* ctl, unsigned workers, rsel_sweep** out) {
  if (!points && count) return null_arg("points");
  if (!out) return null_arg("out");
  return guarded([&] {
    std::vector<relaysel::SweepPoint> grid;
    grid.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      relaysel::SweepPoint p;
      if (points[i].has_n) p.n = points[i].n;
      p.q = points[i].q;
      p.p = points[i].pe;
      grid.push_back(p);
    }
    *out = new rsel_sweep{relaysel::sweep(grid, trials, seed, control(ctl), relaysel::RunOptions{workers})};
  });
}

size_t rsel_sweep_size(const rsel_sweep* sweep) { return sweep ? sweep->rows.size() : 0; }

rsel_status rsel_sweep_row_get(const rsel_sweep* sweep, size_t index, rsel_sweep_row* out) {
  if (!sweep) return null_arg("sweep");
  if (!out) return null_arg("out");
  if (index >= sweep->rows.size()) return fail(RSEL_ERR_INVALID_ARGUMENT, "sweep row index out of range");
  const relaysel::SweepRow& row = sweep->rows[index];
  rsel_sweep_row r{};
  r.point.has_n = row.point.n ? 1 : 0;
  r.point.n = row.point.n.value_or(0);
  r.point.q = static_cast<unsigned>(row.point.q);
  r.point.pe = row.point.p;
  r.analytic = row.analytic;
  if (row.simulated) {
    r.has_simulation = 1;
    r.simulated = to_c(*row.simulated);
  }
  *out = r;
  return RSEL_OK;
}

void rsel_sweep_destroy(rsel_sweep* sweep) { delete sweep; }

rsel_status rsel_sample_normalized(size_t n, uint64_t seed, const rsel_pmf* pmf, double* y_out) {
  if (!y_out) return null_arg("y_out");
  return guarded([&] {
    if (n == 0) throw std::invalid_argument("n must be at least 1");
    relaysel::Rng rng = relaysel::Rng::for_trial(seed, 0);
    relaysel::NormalizedMetrics y = [&] {
      if (!pmf) return relaysel::sample_uniform_normalized(n, rng);
      std::vector<std::size_t> levels(n);
      for (auto& level : levels) level = pmf->model.sample_level(rng);
      return relaysel::expand_levels(levels, pmf->model, rng);
    }();
    for (size_t i = 0; i < n; ++i) y_out[i] = y[i];
  });
}

rsel_status rsel_run_qselect(const double* y, size_t n, double pe, unsigned q, rsel_run** out) {
  if (!y) return null_arg("y");
  if (!out) return null_arg("out");
  return guarded([&] {
    auto run = std::make_unique<rsel_run>();
    relaysel::QSelectResult result = relaysel::run_qselect(copy_metrics(y, n), pe, q, &run->trace);
    run->selected = std::move(result.selected);
    run->slots = result.slots;
    *out = run.release();
  });
}

rsel_status rsel_run_single(const double* y, size_t n, double pe, rsel_run** out) {
  if (!y) return null_arg("y");
  if (!out) return null_arg("out");
  return guarded([&] {
    auto run = std::make_unique<rsel_run>();
    const relaysel::SingleResult result = relaysel::run_single(copy_metrics(y, n), pe, &run->trace);
    run->selected = {result.winner};
    run->slots = result.slots;
    *out = run.release();
  });
}

size_t rsel_run_slots(const rsel_run* run) { return run ? run->slots : 0; }

size_t rsel_run_selected_count(const rsel_run* run) { return run ? run->selected.size() : 0; }

size_t rsel_run_selected(const rsel_run* run, size_t index) {
  return run && index < run->selected.size() ? run->selected[index] : static_cast<size_t>(-1);
}

size_t rsel_run_trace_size(const rsel_run* run) { return run ? run->trace.size() : 0; }

rsel_status rsel_run_trace_record(const rsel_run* run, size_t index, rsel_trace_record* out) {
  if (!run) return null_arg("run");
  if (!out) return null_arg("out");
  if (index >= run->trace.size()) return fail(RSEL_ERR_INVALID_ARGUMENT, "trace index out of range");
  const relaysel::TranscriptRecord& r = run->trace[index];
  *out = rsel_trace_record{r.slot_index,
                           r.interval_start,
                           r.interval_width,
                           relaysel::half_symbol(r.sigma),
                           relaysel::feedback_symbol(r.feedback),
                           r.selected_count};
  return RSEL_OK;
}

void rsel_run_destroy(rsel_run* run) { delete run; }

}  // extern "C"
