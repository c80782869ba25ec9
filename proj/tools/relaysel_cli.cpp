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

// relaysel: tables, sweeps, simulations and protocol traces on stdout or a
// file, as CSV or JSON.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "relaysel/relaysel.h"

namespace {

// Reported to the user as "<flag>: <message>".
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ApiError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(rsel_status status, const std::string& context) {
  if (status != RSEL_OK) throw ApiError(context + ": " + rsel_last_error());
}

template <class T, void (*Destroy)(T*)>
struct Deleter {
  void operator()(T* p) const { Destroy(p); }
};

using TablePtr = std::unique_ptr<rsel_table, Deleter<rsel_table, rsel_table_destroy>>;
using PmfPtr = std::unique_ptr<rsel_pmf, Deleter<rsel_pmf, rsel_pmf_destroy>>;
using SweepPtr = std::unique_ptr<rsel_sweep, Deleter<rsel_sweep, rsel_sweep_destroy>>;
using RunPtr = std::unique_ptr<rsel_run, Deleter<rsel_run, rsel_run_destroy>>;

// --- output records ---------------------------------------------------------

using Cell = std::variant<std::monostate, double, std::uint64_t, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string six_digits(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string csv_cell(const Cell& c) {
  if (std::holds_alternative<double>(c)) return six_digits(std::get<double>(c));
  if (std::holds_alternative<std::uint64_t>(c)) return std::to_string(std::get<std::uint64_t>(c));
  if (std::holds_alternative<std::string>(c)) return std::get<std::string>(c);
  return {};
}

nlohmann::ordered_json json_cell(const Cell& c) {
  if (std::holds_alternative<double>(c)) {
    const double v = std::get<double>(c);
    if (!std::isfinite(v)) return nullptr;
    // Same digits as the CSV rendering.
    return std::stod(six_digits(v));
  }
  if (std::holds_alternative<std::uint64_t>(c)) return std::get<std::uint64_t>(c);
  if (std::holds_alternative<std::string>(c)) return std::get<std::string>(c);
  return nullptr;
}

void render(const Table& t, const std::string& format, std::ostream& out) {
  if (format == "json") {
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
      nlohmann::ordered_json obj = nlohmann::ordered_json::object();
      for (std::size_t i = 0; i < t.columns.size(); ++i) obj[t.columns[i]] = json_cell(row[i]);
      doc.push_back(obj);
    }
    out << doc.dump(2) << '\n';
    return;
  }
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
    out << '\n';
  }
}

// --- shared options ---------------------------------------------------------

struct Common {
  std::string format = "csv";
  std::string out;
  double tol = 1e-12;
};

void add_common(CLI::App* cmd, Common& common) {
  cmd->add_option("--format", common.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", common.out, "Write output to FILE instead of stdout");
  cmd->add_option("--tol", common.tol, "Series truncation tolerance")->check(CLI::PositiveNumber);
}

rsel_series series(const Common& common) {
  rsel_series s = rsel_series_default();
  s.tol = common.tol;
  return s;
}

void emit(const Table& t, const Common& common) {
  if (common.out.empty()) {
    render(t, common.format, std::cout);
    std::cout.flush();
    if (!std::cout) throw std::runtime_error("failed to write to stdout");
    return;
  }
  std::ofstream file(common.out);
  if (!file) throw UsageError("--out: cannot open '" + common.out + "' for writing");
  render(t, common.format, file);
  if (!file.flush()) throw UsageError("--out: failed writing '" + common.out + "'");
}

void require_positive_pe(double pe) {
  if (!(pe > 0.0) || !std::isfinite(pe)) throw UsageError("--pe: must be a positive finite number");
}

// --- analyze ----------------------------------------------------------------

struct AnalyzeArgs {
  Common common;
  double pe = 0.0;
  unsigned q = 1;
  std::optional<std::uint64_t> n;
};

Table run_analyze(const AnalyzeArgs& a) {
  require_positive_pe(a.pe);
  const rsel_series ctl = series(a.common);
  Table t{{"pe", "q", "n", "analytic", "markov", "abs_diff"}, {}};
  std::vector<Cell> row{a.pe, std::uint64_t{a.q}, std::monostate{}, std::monostate{}, std::monostate{},
                        std::monostate{}};
  if (a.n) {
    if (a.q != 1) throw UsageError("--n: a finite node count is only supported with --q 1");
    if (a.pe > static_cast<double>(*a.n)) throw UsageError("--pe: must not exceed --n");
    double v = 0.0;
    check(rsel_avg_slots_finite(*a.n, a.pe, &v), "analyze");
    row[2] = *a.n;
    row[3] = v;
  } else {
    double v = 0.0;
    check(rsel_avg_slots(a.q, a.pe, &ctl, &v), "analyze");
    row[3] = v;
    if (a.q <= 2) {
      double m = 0.0;
      check(rsel_avg_slots_markov(a.q, a.pe, &ctl, &m), "analyze");
      row[4] = m;
      row[5] = std::fabs(v - m);
    }
  }
  t.rows.push_back(std::move(row));
  return t;
}

// --- table ------------------------------------------------------------------

struct TableArgs {
  Common common;
  unsigned qmax = 6;
};

Table run_table(const TableArgs& a) {
  const rsel_series ctl = series(a.common);
  rsel_table* raw = nullptr;
  check(rsel_table_create(a.qmax, &ctl, &raw), "table");
  TablePtr table(raw);
  Table t{{"q", "pe_star", "m_star", "improvement_pct"}, {}};
  for (std::size_t i = 0; i < rsel_table_size(table.get()); ++i) {
    rsel_optimum row{};
    check(rsel_table_row(table.get(), i, &row), "table");
    t.rows.push_back({std::uint64_t{row.q}, row.pe_star, row.m_star, 100.0 * row.improvement});
  }
  return t;
}

// --- optimize ---------------------------------------------------------------

struct OptimizeArgs {
  Common common;
  unsigned q = 1;
  double low = 0.5;
  double high = 2.0;
  double xtol = 1e-4;
};

Table run_optimize(const OptimizeArgs& a) {
  if (!(a.low < a.high)) throw UsageError("--low: must be below --high");
  if (!(a.xtol < a.high - a.low)) throw UsageError("--xtol: must be smaller than the bracket width");
  const rsel_series ctl = series(a.common);
  rsel_optimum opt{};
  check(rsel_optimal_pe(a.q, a.low, a.high, a.xtol, &ctl, &opt), "optimize");
  double gap = 0.0;
  check(rsel_greedy_gap(a.q, &ctl, &gap), "optimize");
  Table t{{"q", "pe_star", "m_star", "improvement_pct", "greedy_gap_pct", "grid_fallback"}, {}};
  t.rows.push_back({std::uint64_t{opt.q}, opt.pe_star, opt.m_star, 100.0 * opt.improvement, 100.0 * gap,
                    std::uint64_t(opt.grid_fallback ? 1 : 0)});
  return t;
}

// --- sweep ------------------------------------------------------------------

struct SweepArgs {
  Common common;
  double pe_from = 0.6;
  double pe_to = 2.0;
  double pe_step = 0.1;
  unsigned q = 1;
  std::vector<std::uint64_t> n;
  std::uint64_t trials = 1000000;
  std::uint64_t seed = 42;
  unsigned workers = 0;
  std::optional<double> bounds;
};

std::vector<double> pe_grid(const SweepArgs& a) {
  if (!(a.pe_step > 0.0)) throw UsageError("--pe-step: must be positive (empty grid)");
  if (!(a.pe_from > 0.0)) throw UsageError("--pe-from: must be positive");
  if (a.pe_to < a.pe_from) throw UsageError("--pe-to: below --pe-from (empty grid)");
  const auto count = static_cast<std::size_t>(std::floor((a.pe_to - a.pe_from) / a.pe_step + 1e-9)) + 1;
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) grid[i] = a.pe_from + static_cast<double>(i) * a.pe_step;
  return grid;
}

Table run_sweep(const SweepArgs& a) {
  const std::vector<double> grid = pe_grid(a);
  if (a.bounds && !(*a.bounds >= std::exp(1.0) / 2.0)) throw UsageError("--bounds: k0 must be at least e/2");
  for (std::uint64_t n : a.n)
    if (n < a.q) throw UsageError("--n: every node count must be at least --q");

  std::vector<rsel_sweep_point> points;
  for (double pe : grid) {
    if (a.n.empty()) {
      points.push_back(rsel_sweep_point{0, 0, a.q, pe});
      continue;
    }
    for (std::uint64_t n : a.n) {
      if (a.q == 1 && pe > static_cast<double>(n)) throw UsageError("--pe-to: grid exceeds --n " + std::to_string(n));
      points.push_back(rsel_sweep_point{1, n, a.q, pe});
    }
  }

  const rsel_series ctl = series(a.common);
  rsel_sweep* raw = nullptr;
  check(rsel_sweep_run(points.data(), points.size(), a.trials, a.seed, &ctl, a.workers, &raw), "sweep");
  SweepPtr sweep(raw);

  Table t{{"pe", "n", "q", "analytic", "simulated", "ci95", "bound_upper", "lower_eq2", "lower_eq3"}, {}};
  for (std::size_t i = 0; i < rsel_sweep_size(sweep.get()); ++i) {
    rsel_sweep_row r{};
    check(rsel_sweep_row_get(sweep.get(), i, &r), "sweep");
    std::vector<Cell> row(t.columns.size());
    row[0] = r.point.pe;
    if (r.point.has_n) row[1] = std::uint64_t{r.point.n};
    row[2] = std::uint64_t{r.point.q};
    row[3] = r.analytic;
    if (r.has_simulation) {
      row[4] = r.simulated.mean_slots;
      row[5] = r.simulated.ci95_half_width;
    }
    if (a.bounds) {
      if (a.q == 1) {
        double upper = 0.0;
        check(rsel_upper_bound(r.point.pe, *a.bounds, &upper), "sweep");
        row[6] = upper;
      }
      double lower = 0.0;
      check(rsel_avg_slots_truncated(a.q, r.point.pe, 4, &lower), "sweep");
      row[7] = lower;
      if (a.q <= 2) {
        check(rsel_avg_slots_markov_truncated(a.q, r.point.pe, 4, &lower), "sweep");
        row[8] = lower;
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
  Common common;
  std::uint64_t n = 0;
  unsigned q = 1;
  double pe = 0.0;
  std::uint64_t trials = 1000000;
  std::uint64_t seed = 42;
  unsigned workers = 0;
  std::string pmf;
  bool trace = false;
};

Table run_trace(const SimulateArgs& a, const rsel_pmf* pmf) {
  std::vector<double> y(a.n);
  check(rsel_sample_normalized(a.n, a.seed, pmf, y.data()), "simulate");
  rsel_run* raw = nullptr;
  check(rsel_run_qselect(y.data(), y.size(), a.pe, a.q, &raw), "simulate");
  RunPtr run(raw);
  Table t{{"slot_index", "interval_start", "interval_width", "sigma", "feedback", "selected_count"}, {}};
  for (std::size_t i = 0; i < rsel_run_trace_size(run.get()); ++i) {
    rsel_trace_record r{};
    check(rsel_run_trace_record(run.get(), i, &r), "simulate");
    t.rows.push_back({std::uint64_t{r.slot_index}, r.interval_start, r.interval_width, std::string(1, r.sigma),
                      std::string(1, r.feedback), std::uint64_t{r.selected_count}});
  }
  return t;
}

Table run_simulate(const SimulateArgs& a) {
  require_positive_pe(a.pe);
  if (a.q > a.n) throw UsageError("--q: must not exceed --n");
  PmfPtr pmf;
  if (!a.pmf.empty()) {
    rsel_pmf* raw = nullptr;
    if (rsel_pmf_parse(a.pmf.c_str(), &raw) != RSEL_OK) throw UsageError(std::string("--pmf: ") + rsel_last_error());
    pmf.reset(raw);
  }
  if (a.trace) return run_trace(a, pmf.get());

  rsel_summary s{};
  if (pmf)
    check(rsel_estimate_discrete(pmf.get(), a.n, a.q, a.pe, a.trials, a.seed, a.workers, &s), "simulate");
  else
    check(rsel_estimate(a.n, a.q, a.pe, a.trials, a.seed, a.workers, &s), "simulate");
  Table t{{"n", "q", "pe", "mean", "stderr", "ci95", "trials", "seed"}, {}};
  t.rows.push_back({a.n, std::uint64_t{a.q}, a.pe, s.mean_slots, s.std_error, s.ci95_half_width, s.trials, s.seed});
  return t;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Splitting-based selection of the best Q relays: analysis, optima and simulation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(rsel_version()));

  AnalyzeArgs analyze;
  auto* c_analyze = app.add_subcommand("analyze", "Average slots to select the best Q nodes");
  c_analyze->add_option("--pe", analyze.pe, "Contention load")->required();
  c_analyze->add_option("--q", analyze.q, "Nodes to select")->check(CLI::Range(1u, 100000u));
  c_analyze->add_option("--n", analyze.n, "Node count (omit for n -> infinity; Q = 1 only)")
      ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{100000000}));
  add_common(c_analyze, analyze.common);

  TableArgs table;
  auto* c_table = app.add_subcommand("table", "Optimal contention load for Q = 1..qmax");
  c_table->add_option("--qmax", table.qmax, "Largest Q")->check(CLI::Range(1u, 1000u));
  add_common(c_table, table.common);

  OptimizeArgs optimize;
  auto* c_opt = app.add_subcommand("optimize", "Optimal contention load for one Q");
  c_opt->add_option("--q", optimize.q, "Nodes to select")->check(CLI::Range(1u, 100000u));
  c_opt->add_option("--low", optimize.low, "Lower end of the search bracket")->check(CLI::PositiveNumber);
  c_opt->add_option("--high", optimize.high, "Upper end of the search bracket")->check(CLI::PositiveNumber);
  c_opt->add_option("--xtol", optimize.xtol, "Tolerance on the optimum")->check(CLI::PositiveNumber);
  add_common(c_opt, optimize.common);

  SweepArgs sweep;
  auto* c_sweep = app.add_subcommand("sweep", "Analytic and simulated averages over a contention-load grid");
  c_sweep->add_option("--pe-from", sweep.pe_from, "First contention load");
  c_sweep->add_option("--pe-to", sweep.pe_to, "Last contention load");
  c_sweep->add_option("--pe-step", sweep.pe_step, "Grid step");
  c_sweep->add_option("--q", sweep.q, "Nodes to select")->check(CLI::Range(1u, 100000u));
  c_sweep->add_option("--n", sweep.n, "Node counts to simulate (repeatable; omit for analytic only)")
      ->delimiter(',')
      ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{100000000}));
  c_sweep->add_option("--trials", sweep.trials, "Trials per simulated point")->check(CLI::PositiveNumber);
  c_sweep->add_option("--seed", sweep.seed, "Random seed");
  c_sweep->add_option("--workers", sweep.workers, "Worker threads (0 = all cores)");
  c_sweep->add_option("--bounds", sweep.bounds, "Add the upper bound with this k0 and 4-term lower bounds");
  add_common(c_sweep, sweep.common);

  SimulateArgs simulate;
  auto* c_sim = app.add_subcommand("simulate", "Monte Carlo estimate of the average slots, or one protocol trace");
  c_sim->add_option("--n", simulate.n, "Node count")->required()->check(CLI::Range(std::uint64_t{1},
                                                                                      std::uint64_t{100000000}));
  c_sim->add_option("--q", simulate.q, "Nodes to select")->check(CLI::Range(1u, 100000u));
  c_sim->add_option("--pe", simulate.pe, "Contention load")->required();
  c_sim->add_option("--trials", simulate.trials, "Trials")->check(CLI::PositiveNumber);
  c_sim->add_option("--seed", simulate.seed, "Random seed");
  c_sim->add_option("--workers", simulate.workers, "Worker threads (0 = all cores)");
  c_sim->add_option("--pmf", simulate.pmf, "Discrete metric pmf, e.g. 0.2,0.5,0.3");
  c_sim->add_flag("--trace", simulate.trace, "Run one instance and print its transcript");
  add_common(c_sim, simulate.common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*c_analyze) emit(run_analyze(analyze), analyze.common);
    if (*c_table) emit(run_table(table), table.common);
    if (*c_opt) emit(run_optimize(optimize), optimize.common);
    if (*c_sweep) emit(run_sweep(sweep), sweep.common);
    if (*c_sim) emit(run_simulate(simulate), simulate.common);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
