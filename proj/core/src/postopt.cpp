#include "utat/postopt.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

#include "utat/errors.hpp"

namespace utat::postopt {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z += kGolden;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t index)
    : state(mix64(seed) ^ mix64(index * kGolden + 0x632BE59BD9B4E019ULL)) {}

std::uint64_t Rng::next() {
  state += kGolden;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::string scheme_name(OrderedScheme s) {
  return s == OrderedScheme::nested ? "nested" : "sorted";
}

OrderedScheme scheme_from_name(const std::string& name) {
  if (name == "nested") return OrderedScheme::nested;
  if (name == "sorted") return OrderedScheme::sorted;
  throw Error("validation-error", "unknown ordered scheme '" + name + "' (nested, sorted)");
}

std::vector<int> order_indices(const CriteriaOrder& order,
                               const timeseries::MeasureTensor& measures) {
  if (static_cast<int>(order.ids.size()) != measures.n()) {
    throw Error("validation-error", "criteria order must name every criterion exactly once");
  }
  std::vector<int> idx;
  std::vector<bool> used(measures.n(), false);
  for (const auto& id : order.ids) {
    const int j = measures.criterion_index(id);
    if (j < 0) throw Error("validation-error", "criteria order names unknown criterion '" + id + "'");
    if (used[j]) throw Error("validation-error", "criteria order repeats criterion '" + id + "'");
    used[j] = true;
    idx.push_back(j);
  }
  return idx;
}

std::vector<double> sample_mu(Rng& rng, int n) {
  std::vector<double> mu(n);
  for (double& v : mu) v = rng.uniform();
  return mu;
}

std::vector<double> assign_ordered(const std::vector<double>& draws,
                                   const std::vector<int>& order_idx) {
  std::vector<double> sorted = draws;
  std::stable_sort(sorted.begin(), sorted.end(), std::greater<double>());
  std::vector<double> mu(draws.size(), 0.0);
  for (std::size_t q = 0; q < order_idx.size(); ++q) mu[order_idx[q]] = sorted[q];
  return mu;
}

std::vector<double> sample_mu_ordered(Rng& rng, const std::vector<int>& order_idx) {
  return assign_ordered(sample_mu(rng, static_cast<int>(order_idx.size())), order_idx);
}

std::vector<double> sample_mu_nested(Rng& rng, const std::vector<int>& order_idx) {
  std::vector<double> mu(order_idx.size(), 0.0);
  double acc = 1.0;
  for (int j : order_idx) {
    acc *= rng.uniform();
    mu[j] = acc;
  }
  return mu;
}

lp::LinearProgram mo_program(const timeseries::MeasureTensor& measures,
                             const disagg::RankingChain& ranking,
                             const disagg::DisaggConfig& config,
                             const disagg::ValueModel& fitted) {
  const disagg::ProgramLayout layout = disagg::layout_for(measures, ranking, config);
  lp::LinearProgram program = disagg::build_program(measures, ranking, config);
  std::vector<std::pair<int, double>> terms;
  for (int v = layout.n_w; v < layout.total; ++v) terms.emplace_back(v, 1.0);
  program.add_constraint(std::move(terms), lp::Relation::le, fitted.z + config.epsilon, "zbound");
  return program;
}

namespace {

// Installs the weighted-sum objective for mu and solves.
lp::LpSolution solve_with_mu(lp::LinearProgram& program, const disagg::ProgramLayout& layout,
                             const timeseries::MeasureTensor& measures,
                             const std::vector<double>& mu) {
  std::vector<double> objective(layout.total, 0.0);
  for (int k = 0; k < measures.h(); ++k) {
    for (int j = 0; j < measures.n(); ++j) {
      for (int l = 0; l < layout.w_count[k][j]; ++l) {
        objective[layout.w_index(k, j, l)] = mu[j];
      }
    }
  }
  program.set_objective(lp::Sense::maximize, std::move(objective));
  return lp::solve(program);
}

void require_optimal(const lp::LpSolution& sol, const std::string& where) {
  if (sol.status == lp::SolveStatus::optimal) return;
  const char* what = sol.status == lp::SolveStatus::infeasible    ? "infeasible"
                     : sol.status == lp::SolveStatus::unbounded   ? "unbounded"
                                                                  : "numerical failure";
  throw Error("solver-failure", where + ": " + what, 4);
}

}  // namespace

MoResult mo_solve(const timeseries::MeasureTensor& measures, const disagg::RankingChain& ranking,
                  const disagg::DisaggConfig& config, const disagg::ValueModel& fitted,
                  const std::vector<double>& mu) {
  if (static_cast<int>(mu.size()) != measures.n()) {
    throw Error("validation-error", "mu must have one component per criterion");
  }
  const disagg::ProgramLayout layout = disagg::layout_for(measures, ranking, config);
  lp::LinearProgram program = mo_program(measures, ranking, config, fitted);
  const lp::LpSolution sol = solve_with_mu(program, layout, measures, mu);
  require_optimal(sol, "multi-objective program");
  MoResult result;
  result.w.assign(sol.values.begin(), sol.values.begin() + layout.n_w);
  result.solution = sol.values;
  result.objective = sol.objective;
  return result;
}

MinMaxReport classical_minmax(const timeseries::MeasureTensor& measures,
                              const disagg::RankingChain& ranking,
                              const disagg::DisaggConfig& config,
                              const disagg::ValueModel& fitted) {
  const disagg::ProgramLayout layout = disagg::layout_for(measures, ranking, config);
  lp::LinearProgram program = disagg::build_program(measures, ranking, config);
  {
    std::vector<std::pair<int, double>> terms;
    for (int v = layout.n_w; v < layout.total; ++v) terms.emplace_back(v, 1.0);
    program.add_constraint(std::move(terms), lp::Relation::le,
                           fitted.z * (1.0 + config.gamma), "zbound");
  }

  MinMaxReport report;
  for (int k = 0; k < measures.h(); ++k) {
    for (int j = 0; j < measures.n(); ++j) {
      MinMaxRow row;
      row.k = k;
      row.j = j;
      row.measure = measures.measures[k];
      row.criterion = measures.criteria[j].id;
      for (const lp::Sense sense : {lp::Sense::minimize, lp::Sense::maximize}) {
        std::vector<double> objective(layout.total, 0.0);
        for (int l = 0; l < layout.w_count[k][j]; ++l) {
          objective[layout.w_index(k, j, l)] = 1.0;
        }
        program.set_objective(sense, std::move(objective));
        const lp::LpSolution sol = lp::solve(program);
        require_optimal(sol, "post-optimization program");
        (sense == lp::Sense::minimize ? row.min : row.max) = sol.objective;
        report.solutions.emplace_back(sol.values.begin(), sol.values.begin() + layout.n_w);
      }
      report.rows.push_back(std::move(row));
    }
  }

  // The reported per-pair value is the arithmetic mean of that pair's top
  // marginal value across all solved programs, not the midpoint of the bounds.
  const double count = static_cast<double>(report.solutions.size());
  for (auto& row : report.rows) {
    double sum = 0.0;
    for (const auto& w : report.solutions) {
      for (int l = 0; l < layout.w_count[row.k][row.j]; ++l) {
        sum += w[layout.w_index(row.k, row.j, l)];
      }
    }
    row.average = sum / count;
  }
  return report;
}

namespace {

std::vector<double> dedup_key(const std::vector<double>& w) {
  std::vector<double> key(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    double r = std::nearbyint(w[i] * 1e6) / 1e6;
    if (r == 0.0) r = 0.0;  // normalize -0
    key[i] = r;
  }
  return key;
}

bool keys_close(const std::vector<double>& a, const std::vector<double>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::fabs(a[i] - b[i]) > 1e-6 + 1e-12) return false;
  }
  return true;
}

}  // namespace

void add_to_ensemble(SolutionEnsemble& ensemble, std::vector<double> w,
                     std::vector<double> solution, double objective, long long iteration) {
  std::vector<double> key = dedup_key(w);
  for (auto& entry : ensemble.entries) {
    if (keys_close(entry.key, key)) {
      ++entry.count;
      return;
    }
  }
  EnsembleEntry entry;
  entry.w = std::move(w);
  entry.solution = std::move(solution);
  entry.key = std::move(key);
  entry.count = 1;
  entry.objective = objective;
  entry.first_iteration = iteration;
  ensemble.entries.push_back(std::move(entry));
}

std::vector<double> weighted_average(const SolutionEnsemble& ensemble) {
  if (ensemble.entries.empty()) {
    throw Error("validation-error", "weighted average of an empty ensemble");
  }
  std::vector<double> avg(ensemble.entries.front().w.size(), 0.0);
  long long total = 0;
  for (const auto& entry : ensemble.entries) {
    total += entry.count;
    for (std::size_t i = 0; i < avg.size(); ++i) {
      avg[i] += static_cast<double>(entry.count) * entry.w[i];
    }
  }
  for (double& v : avg) v /= static_cast<double>(total);
  return avg;
}

SolutionEnsemble mo_simulate(const timeseries::MeasureTensor& measures,
                             const disagg::RankingChain& ranking,
                             const disagg::DisaggConfig& config,
                             const disagg::ValueModel& fitted, const SimOptions& options) {
  if (options.iterations < 1) throw Error("validation-error", "iterations must be >= 1");
  const int threads = std::max(1, options.threads);
  const disagg::ProgramLayout layout = disagg::layout_for(measures, ranking, config);
  const int n = measures.n();

  std::vector<int> order_idx;
  if (options.order) order_idx = order_indices(*options.order, measures);

  const lp::LinearProgram base = mo_program(measures, ranking, config, fitted);

  SolutionEnsemble ensemble;
  ensemble.iterations = options.iterations;
  ensemble.seed = options.seed;
  ensemble.order = options.order;
  ensemble.scheme = options.scheme;

  struct Draw {
    std::vector<double> w;
    std::vector<double> solution;
    double objective = 0.0;
  };

  auto run_one = [&](lp::LinearProgram& program, long long iteration) -> Draw {
    Rng rng(options.seed, static_cast<std::uint64_t>(iteration));
    std::vector<double> mu;
    if (options.order) {
      mu = options.scheme == OrderedScheme::nested ? sample_mu_nested(rng, order_idx)
                                                   : sample_mu_ordered(rng, order_idx);
    } else {
      mu = sample_mu(rng, n);
    }
    const lp::LpSolution sol = solve_with_mu(program, layout, measures, mu);
    if (sol.status != lp::SolveStatus::optimal) {
      throw Error("solver-failure",
                  "multi-objective solve failed at iteration " + std::to_string(iteration), 4);
    }
    Draw draw;
    draw.w.assign(sol.values.begin(), sol.values.begin() + layout.n_w);
    draw.solution = sol.values;
    draw.objective = sol.objective;
    return draw;
  };

  // Iterations are computed in parallel chunks but always folded into the
  // ensemble in iteration order, so the result is invariant to thread count.
  const long long chunk_size = 512;
  std::vector<Draw> buffer;
  for (long long chunk_begin = 0; chunk_begin < options.iterations; chunk_begin += chunk_size) {
    const long long chunk_end = std::min(options.iterations, chunk_begin + chunk_size);
    const long long count = chunk_end - chunk_begin;
    buffer.assign(static_cast<std::size_t>(count), Draw{});

    if (threads == 1 || count == 1) {
      lp::LinearProgram program = base;
      for (long long i = 0; i < count; ++i) buffer[i] = run_one(program, chunk_begin + i);
    } else {
      const int workers = static_cast<int>(std::min<long long>(threads, count));
      std::vector<std::thread> pool;
      std::vector<std::exception_ptr> failures(workers);
      for (int wkr = 0; wkr < workers; ++wkr) {
        pool.emplace_back([&, wkr]() {
          try {
            lp::LinearProgram program = base;
            for (long long i = wkr; i < count; i += workers) {
              buffer[i] = run_one(program, chunk_begin + i);
            }
          } catch (...) {
            failures[wkr] = std::current_exception();
          }
        });
      }
      for (auto& th : pool) th.join();
      for (const auto& failure : failures) {
        if (failure) std::rethrow_exception(failure);
      }
    }

    for (long long i = 0; i < count; ++i) {
      add_to_ensemble(ensemble, std::move(buffer[i].w), std::move(buffer[i].solution),
                      buffer[i].objective, chunk_begin + i);
    }
  }

  ensemble.weighted_average = weighted_average(ensemble);
  return ensemble;
}

std::vector<double> criterion_totals(const disagg::ProgramLayout& layout,
                                     const std::vector<double>& w) {
  const std::size_t h = layout.w_offset.size();
  const std::size_t n = h == 0 ? 0 : layout.w_offset[0].size();
  std::vector<double> totals(n, 0.0);
  for (std::size_t k = 0; k < h; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      for (int l = 0; l < layout.w_count[k][j]; ++l) {
        totals[j] += w[layout.w_index(static_cast<int>(k), static_cast<int>(j), l)];
      }
    }
  }
  return totals;
}

std::vector<ObjectiveClass> objective_classes(const SolutionEnsemble& ensemble,
                                              const disagg::ProgramLayout& layout) {
  std::vector<ObjectiveClass> classes;
  for (const auto& entry : ensemble.entries) {
    std::vector<double> totals = criterion_totals(layout, entry.w);
    for (double& v : totals) {
      v = std::nearbyint(v * 1e6) / 1e6;
      if (v == 0.0) v = 0.0;
    }
    bool found = false;
    for (auto& cls : classes) {
      if (cls.totals == totals) {
        cls.count += entry.count;
        found = true;
        break;
      }
    }
    if (!found) classes.push_back({std::move(totals), entry.count});
  }
  return classes;
}

}  // namespace utat::postopt
