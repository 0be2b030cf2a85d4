#pragma once

#include <string>
#include <vector>

#include "utat/lp.hpp"
#include "utat/timeseries.hpp"

namespace utat::disagg {

/// Which disaggregation program is generated.  The classical variants force
/// a single descriptive measure (h = 1); the temporal variant accepts any h.
enum class Variant { uta, utastar, utastar_t };

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);

struct DisaggConfig {
  double delta = 0.05;    ///< strict-preference threshold (> 0)
  double epsilon = 1e-6;  ///< multi-objective post-optimization slack (>= 0)
  double gamma = 0.01;    ///< classical post-optimization slack factor (>= 0)
  Variant variant = Variant::utastar_t;
};

enum class Link { strict, indifferent };

/// The decision-maker's weak order over reference alternatives, best first.
struct RankingChain {
  std::vector<std::string> order;
  std::vector<Link> links;  ///< links[r] relates order[r] to order[r+1]

  /// Parses a one-line chain such as "MY > RU > TR" or "A ~ B > C".
  /// Malformed input raises a parse error carrying the 1-based column.
  static RankingChain parse(const std::string& line);
};

/// Variable-block layout of a generated program: weight steps first, in
/// (measure, criterion, segment) lexicographic order, then overestimation
/// errors, then underestimation errors (both in ranking order).
struct ProgramLayout {
  std::vector<std::vector<int>> w_offset;  ///< [k][j] -> first flat index
  std::vector<std::vector<int>> w_count;   ///< [k][j] -> segment count (alpha-1)
  int n_w = 0;
  int sigma_plus_begin = -1;  ///< -1 under the single-error variant
  int sigma_minus_begin = 0;
  int total = 0;

  int w_index(int k, int j, int l) const { return w_offset[k][j] + l; }  // l 0-based
};

ProgramLayout layout_for(const timeseries::MeasureTensor& measures, const RankingChain& ranking,
                         const DisaggConfig& config);

/// Builds the disaggregation program: one pairwise row per consecutive
/// ranking pair (>= delta for strict, = 0 for indifferent), one
/// normalization equality per measure, objective minimizing the total
/// estimation error.
lp::LinearProgram build_program(const timeseries::MeasureTensor& measures,
                                const RankingChain& ranking, const DisaggConfig& config);

/// Fitted preference model.
struct ValueModel {
  std::vector<std::string> measures;
  std::vector<timeseries::CriterionSpec> criteria;
  std::vector<std::string> alternatives;                   ///< tensor order
  std::vector<std::vector<timeseries::ScaleGrid>> scales;  ///< [measure][criterion]
  std::vector<std::vector<std::vector<double>>> w;         ///< [measure][criterion][segment]
  std::vector<std::string> reference;                      ///< ranked alternatives, best first
  std::vector<double> sigma_plus;                          ///< per reference alternative
  std::vector<double> sigma_minus;                         ///< per reference alternative
  double z = 0.0;                                          ///< objective value (total error)
  DisaggConfig config;
  timeseries::ScalePolicy scale_policy;
};

/// Solves the generated program and packages the model.  z = 0 means the
/// ranking is representable.  An infeasible or unbounded program cannot occur
/// by construction and is reported as an internal error.
ValueModel fit(const timeseries::MeasureTensor& measures, const RankingChain& ranking,
               const DisaggConfig& config);

/// Piecewise-linear marginal value of measure k / criterion j at x
/// (0 at the first breakpoint, cumulative step weights at the others,
/// linear interpolation in between).  x outside the grid raises an error.
double marginal_value(const ValueModel& model, int k, int j, double x);

/// Global value of an alternative: the sum of all marginal values at its
/// measure coordinates.  Range [0, h].
double global_value(const ValueModel& model, const timeseries::MeasureTensor& measures,
                    const std::string& alternative);

/// One tie group of the model ranking (alternatives sharing a global value).
struct RankedGroup {
  double value = 0.0;
  std::vector<std::string> ids;
};

/// Alternatives in descending global value; values equal within 1e-9 are
/// grouped as ties.
std::vector<RankedGroup> rank_alternatives(const ValueModel& model,
                                           const timeseries::MeasureTensor& measures);

struct TauResult {
  double tau = 0.0;
  long concordant = 0;
  long discordant = 0;
};

/// Kendall rank correlation between two strict orders over the same
/// identifier set: (concordant - discordant) / (n(n-1)/2).
TauResult kendall_tau(const std::vector<std::string>& a, const std::vector<std::string>& b);

/// Splits a flat LP assignment into the [measure][criterion][segment] shape.
std::vector<std::vector<std::vector<double>>> unflatten_w(const ProgramLayout& layout,
                                                          const std::vector<double>& x);

}  // namespace utat::disagg
