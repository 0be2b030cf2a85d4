// Microbenchmarks for the hot paths: measure extraction, model fitting,
// simplex solves, and the Monte Carlo sweep.  All inputs are seeded synthetic
// panels so runs are comparable across machines and revisions.
#include <benchmark/benchmark.h>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "utat/disagg.hpp"
#include "utat/lp.hpp"
#include "utat/postopt.hpp"
#include "utat/timeseries.hpp"

using namespace utat;

namespace {

timeseries::TimeSeriesTensor synthetic_panel(int m, int n, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> level(0.0, 100.0);
  std::uniform_real_distribution<double> drift(-2.0, 2.0);
  std::uniform_real_distribution<double> noise(-1.0, 1.0);

  timeseries::TimeSeriesTensor t;
  for (int i = 0; i < m; ++i) t.alternatives.push_back("a" + std::to_string(i + 1));
  for (int j = 0; j < n; ++j) {
    t.criteria.push_back({"g" + std::to_string(j + 1), timeseries::Direction::maximize});
  }
  t.samples = samples;
  t.values.resize(static_cast<std::size_t>(m) * n * samples);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      const double base = level(rng);
      const double trend = drift(rng);
      for (int s = 0; s < samples; ++s) {
        t.at(i, j, s) = base + trend * s + noise(rng);
      }
    }
  }
  return t;
}

disagg::RankingChain random_ranking(const timeseries::TimeSeriesTensor& tensor,
                                    std::uint64_t seed) {
  std::vector<std::string> ids = tensor.alternatives;
  std::mt19937_64 rng(seed);
  std::shuffle(ids.begin(), ids.end(), rng);
  disagg::RankingChain chain;
  chain.order = std::move(ids);
  chain.links.assign(chain.order.size() - 1, disagg::Link::strict);
  return chain;
}

struct Problem {
  timeseries::TimeSeriesTensor tensor;
  timeseries::MeasureTensor measures;
  disagg::RankingChain ranking;
  disagg::DisaggConfig config;

  Problem(int m, int n, int samples)
      : tensor(synthetic_panel(m, n, samples, 42)),
        measures(timeseries::extract_measures(tensor, {"mean", "slope"},
                                              timeseries::ScalePolicy::observed())),
        ranking(random_ranking(tensor, 7)) {}
};

void BM_ExtractMeasures(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const auto tensor = synthetic_panel(m, 4, 12, 42);
  for (auto _ : state) {
    benchmark::DoNotOptimize(timeseries::extract_measures(
        tensor, {"mean", "slope"}, timeseries::ScalePolicy::observed()));
  }
}
BENCHMARK(BM_ExtractMeasures)->Arg(10)->Arg(50)->Arg(200);

void BM_Fit(benchmark::State& state) {
  const Problem problem(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), 8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(disagg::fit(problem.measures, problem.ranking, problem.config));
  }
}
BENCHMARK(BM_Fit)->Args({10, 3})->Args({20, 4})->Args({40, 4});

void BM_SimplexSolve(benchmark::State& state) {
  const Problem problem(static_cast<int>(state.range(0)), 3, 8);
  const auto program = disagg::build_program(problem.measures, problem.ranking, problem.config);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lp::solve(program));
  }
}
BENCHMARK(BM_SimplexSolve)->Arg(10)->Arg(20)->Arg(40);

void BM_Simulate(benchmark::State& state) {
  const Problem problem(10, 3, 8);
  const auto model = disagg::fit(problem.measures, problem.ranking, problem.config);
  postopt::SimOptions opts;
  opts.iterations = 64;
  opts.seed = 42;
  opts.threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        postopt::mo_simulate(problem.measures, problem.ranking, problem.config, model, opts));
  }
  state.SetItemsProcessed(state.iterations() * opts.iterations);
}
BENCHMARK(BM_Simulate)->Arg(1)->Arg(4);

}  // namespace

BENCHMARK_MAIN();
