#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace utat::timeseries {

enum class Direction { maximize, minimize };

struct CriterionSpec {
  std::string id;
  Direction direction = Direction::maximize;
};

/// Dense panel of raw performances: one series of `samples` values per
/// (alternative, criterion) pair.  Time is indexed 1..samples on input;
/// internally the accessors take a 0-based sample index.
struct TimeSeriesTensor {
  std::vector<std::string> alternatives;  ///< first-appearance order, length m
  std::vector<CriterionSpec> criteria;    ///< first-appearance order, length n
  int samples = 0;                        ///< T
  std::vector<double> values;             ///< laid out [alternative][criterion][t]

  int m() const { return static_cast<int>(alternatives.size()); }
  int n() const { return static_cast<int>(criteria.size()); }

  double at(int i, int j, int t) const {
    return values[(static_cast<std::size_t>(i) * criteria.size() + j) * samples + t];
  }
  double& at(int i, int j, int t) {
    return values[(static_cast<std::size_t>(i) * criteria.size() + j) * samples + t];
  }
  std::span<const double> series(int i, int j) const {
    return {values.data() + (static_cast<std::size_t>(i) * criteria.size() + j) * samples,
            static_cast<std::size_t>(samples)};
  }

  /// Index of an alternative/criterion id, or -1 when absent.
  int alternative_index(const std::string& id) const;
  int criterion_index(const std::string& id) const;
};

/// Parses a `alternative,criterion,t,value` record stream (header required,
/// `t` 1-based and contiguous).  Alternatives and criteria keep their order
/// of first appearance.  Throws Error on duplicate cells, missing cells,
/// non-numeric values, or fewer than 2 samples.
TimeSeriesTensor load_tensor(std::istream& in);

/// File variant; throws Error("input-not-found") when the file is absent.
TimeSeriesTensor load_tensor(const std::filesystem::path& file);

/// Overrides criterion directions by id; unknown ids raise a validation error.
void set_directions(TimeSeriesTensor& tensor,
                    const std::vector<std::pair<std::string, Direction>>& directions);

/// Arithmetic mean of the series.  Errors on an empty series.
double mean_measure(std::span<const double> series);

/// Ordinary-least-squares slope of the series against the time index
/// t = 1..T, in criterion units per time step.  Errors when T < 2.
double slope_measure(std::span<const double> series);

/// Most recent sample of the series (the static collapse used by the
/// single-measure model variants).  Errors on an empty series.
double last_measure(std::span<const double> series);

/// Measure registry: applies one of the known measure ids
/// ("mean", "slope", "last") to a series.  Unknown ids raise an error.
double apply_measure(const std::string& id, std::span<const double> series);

/// How the evaluation grid for one (measure, criterion) pair is built.
struct ScalePolicy {
  enum class Kind {
    observed_values,  ///< sorted distinct observed values become breakpoints
    equal_interval,   ///< `alpha` equally spaced breakpoints over [min, max]
  };
  Kind kind = Kind::observed_values;
  int alpha = 0;  ///< grade count, equal_interval only (>= 2)

  static ScalePolicy observed() { return {Kind::observed_values, 0}; }
  static ScalePolicy equal(int alpha) { return {Kind::equal_interval, alpha}; }
};

/// Strictly increasing breakpoint grid c^1 < ... < c^alpha for one
/// (measure, criterion) pair.
struct ScaleGrid {
  std::vector<double> breakpoints;
  ScalePolicy policy;

  int alpha() const { return static_cast<int>(breakpoints.size()); }
  double lo() const { return breakpoints.front(); }
  double hi() const { return breakpoints.back(); }
};

/// Builds a grid from the measure values of all alternatives.  Fewer than two
/// distinct values is a degenerate scale and raises an error.
ScaleGrid build_scale(std::vector<double> values, const ScalePolicy& policy);

/// Locates x inside the grid: returns the 1-based segment index l
/// (1 <= l <= alpha-1) and the fraction theta in [0,1] such that
/// x = c^l + theta * (c^(l+1) - c^l).  The top breakpoint reports
/// (alpha-1, 1).  x outside [c^1, c^alpha] raises an error.
std::pair<int, double> locate(const ScaleGrid& grid, double x);

/// Descriptive-measure tensor: each raw series collapsed to h scalar
/// summaries, plus one scale grid per (measure, criterion).
struct MeasureTensor {
  std::vector<std::string> measures;           ///< ids, length h
  std::vector<std::string> alternatives;       ///< copied from the source tensor
  std::vector<CriterionSpec> criteria;         ///< original directions echoed
  std::vector<double> values;                  ///< [alternative][criterion][measure]
  std::vector<std::vector<ScaleGrid>> scales;  ///< [measure][criterion]
  ScalePolicy policy;

  int m() const { return static_cast<int>(alternatives.size()); }
  int n() const { return static_cast<int>(criteria.size()); }
  int h() const { return static_cast<int>(measures.size()); }

  double at(int i, int j, int k) const {
    return values[(static_cast<std::size_t>(i) * criteria.size() + j) * measures.size() + k];
  }
  double& at(int i, int j, int k) {
    return values[(static_cast<std::size_t>(i) * criteria.size() + j) * measures.size() + k];
  }

  int alternative_index(const std::string& id) const;
  int criterion_index(const std::string& id) const;
};

/// Collapses every series to the requested measures and builds one grid per
/// (measure, criterion).  Minimize-direction criteria are negated before any
/// measure is computed, so all downstream value functions are non-decreasing.
MeasureTensor extract_measures(const TimeSeriesTensor& tensor,
                               const std::vector<std::string>& measures,
                               const ScalePolicy& policy);

}  // namespace utat::timeseries
