#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "utat/disagg.hpp"

namespace utat::postopt {

/// Counter-based generator: the stream for iteration i of a run is fully
/// determined by (seed, i), so parallel and serial executions of a
/// simulation produce identical ensembles.
struct Rng {
  std::uint64_t state;

  Rng(std::uint64_t seed, std::uint64_t index);
  std::uint64_t next();
  double uniform();  ///< [0, 1)
};

/// Strict relevance order over criterion ids, most relevant first.
struct CriteriaOrder {
  std::vector<std::string> ids;
};

/// How ordered weight vectors are sampled along a criteria order:
///  - nested: each weight is the previous one scaled by a fresh uniform
///    (hierarchical magnitude decay);
///  - sorted: n independent uniforms sorted descending (order statistics).
enum class OrderedScheme { nested, sorted };

std::string scheme_name(OrderedScheme s);
OrderedScheme scheme_from_name(const std::string& name);

/// Resolves a criteria order to 0-based criterion indices; the order must be
/// a permutation of the tensor's criteria.
std::vector<int> order_indices(const CriteriaOrder& order,
                               const timeseries::MeasureTensor& measures);

/// Independent U[0,1) draw per criterion, no normalization.
std::vector<double> sample_mu(Rng& rng, int n);

/// Pure assignment step of the sorted scheme: sorts the draws descending and
/// assigns the largest to the most relevant criterion.  Exact ties keep the
/// earlier order position first so the chain stays strict.
std::vector<double> assign_ordered(const std::vector<double>& draws,
                                   const std::vector<int>& order_idx);

/// Sorted scheme: draws n uniforms and assigns them via assign_ordered.
std::vector<double> sample_mu_ordered(Rng& rng, const std::vector<int>& order_idx);

/// Nested scheme: mu over the order is u1, u1*u2, u1*u2*u3, ...
std::vector<double> sample_mu_nested(Rng& rng, const std::vector<int>& order_idx);

/// The multi-objective program: the base disaggregation rows plus the
/// near-optimality bound (total error <= z* + epsilon).  The objective is
/// installed per weight vector by mo_solve.
lp::LinearProgram mo_program(const timeseries::MeasureTensor& measures,
                             const disagg::RankingChain& ranking,
                             const disagg::DisaggConfig& config,
                             const disagg::ValueModel& fitted);

struct MoResult {
  std::vector<double> w;         ///< flat weight block (layout order)
  std::vector<double> solution;  ///< full assignment including error variables
  double objective = 0.0;
};

/// Maximizes sum_j mu_j * (total cumulative weight on criterion j) over the
/// bounded polyhedron and returns the optimal vertex.  With all mu_j > 0 the
/// result is Pareto optimal; with mu_j >= 0 it is weakly Pareto optimal.
MoResult mo_solve(const timeseries::MeasureTensor& measures, const disagg::RankingChain& ranking,
                  const disagg::DisaggConfig& config, const disagg::ValueModel& fitted,
                  const std::vector<double>& mu);

struct MinMaxRow {
  int k = 0, j = 0;
  std::string measure, criterion;
  double min = 0.0, max = 0.0;
  double average = 0.0;  ///< mean top-level value across all 2*n*h solutions
};

struct MinMaxReport {
  std::vector<MinMaxRow> rows;                  ///< (k, j) lexicographic
  std::vector<std::vector<double>> solutions;   ///< flat w per solved program,
                                                ///< (k, j, min) then (k, j, max)
};

/// Classical post-optimization: for every (measure, criterion) pair,
/// minimizes and maximizes the pair's top marginal value over the base
/// polyhedron tightened by total error <= z* * (1 + gamma).
MinMaxReport classical_minmax(const timeseries::MeasureTensor& measures,
                              const disagg::RankingChain& ranking,
                              const disagg::DisaggConfig& config,
                              const disagg::ValueModel& fitted);

struct EnsembleEntry {
  std::vector<double> w;         ///< representative exact flat weight vector
  std::vector<double> solution;  ///< representative full assignment (incl. errors)
  std::vector<double> key;       ///< w rounded to dedup precision
  long long count = 0;
  double objective = 0.0;        ///< attained objective of the representative
  long long first_iteration = 0;
};

struct SolutionEnsemble {
  long long iterations = 0;
  std::uint64_t seed = 0;
  std::optional<CriteriaOrder> order;
  OrderedScheme scheme = OrderedScheme::nested;
  std::vector<EnsembleEntry> entries;    ///< first-appearance order
  std::vector<double> weighted_average;  ///< occurrence-weighted mean, flat
};

struct SimOptions {
  long long iterations = 1000;
  std::uint64_t seed = 42;
  std::optional<CriteriaOrder> order;
  OrderedScheme scheme = OrderedScheme::nested;
  int threads = 1;
};

/// Monte Carlo sweep: per iteration draws a weight vector (sample_mu, or the
/// ordered sampler when an order is given), solves the multi-objective
/// program, and folds the vertex into the ensemble (rounding dedup plus
/// near-duplicate merge).  The fold runs in iteration order regardless of
/// thread count, so ensembles are byte-identical across parallelism levels.
SolutionEnsemble mo_simulate(const timeseries::MeasureTensor& measures,
                             const disagg::RankingChain& ranking,
                             const disagg::DisaggConfig& config,
                             const disagg::ValueModel& fitted, const SimOptions& options);

/// Occurrence-weighted mean of the entries' weight vectors (recomputed from
/// the stored entries; mo_simulate stores the same quantity).
std::vector<double> weighted_average(const SolutionEnsemble& ensemble);

/// Dedup/merge step used by mo_simulate, exposed for tests: adds one solved
/// vertex to the ensemble.
void add_to_ensemble(SolutionEnsemble& ensemble, std::vector<double> w,
                     std::vector<double> solution, double objective, long long iteration);

/// Per-criterion total cumulative weight v_j = sum_k sum_l w_kjl of a flat
/// weight vector.  Two vertices attain the same objective under every weight
/// vector mu iff their totals agree.
std::vector<double> criterion_totals(const disagg::ProgramLayout& layout,
                                     const std::vector<double>& w);

struct ObjectiveClass {
  std::vector<double> totals;  ///< rounded per-criterion totals
  long long count = 0;
};

/// Groups ensemble entries into objective-equivalence classes by their
/// per-criterion totals rounded at 1e-6.
std::vector<ObjectiveClass> objective_classes(const SolutionEnsemble& ensemble,
                                              const disagg::ProgramLayout& layout);

}  // namespace utat::postopt
