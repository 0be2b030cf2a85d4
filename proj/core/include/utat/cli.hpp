#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "utat/disagg.hpp"
#include "utat/postopt.hpp"
#include "utat/timeseries.hpp"

namespace utat::cli {

/// Fully resolved run configuration shared by the commands.  The front end
/// builds it from flags plus an optional JSON config file (flags win).
struct RunConfig {
  std::filesystem::path tensor_path;
  std::filesystem::path ranking_path;
  std::filesystem::path output_dir = ".";
  std::optional<std::filesystem::path> model_path;  ///< reuse a fitted model

  std::vector<std::string> measures = {"mean", "slope"};
  timeseries::ScalePolicy scale_policy = timeseries::ScalePolicy::observed();
  std::vector<std::pair<std::string, timeseries::Direction>> directions;
  disagg::DisaggConfig disagg;

  long long iterations = 1000;
  std::uint64_t seed = 42;
  std::optional<postopt::CriteriaOrder> criteria_order;
  postopt::OrderedScheme order_scheme = postopt::OrderedScheme::nested;
  int threads = 1;

  bool plots = false;
  bool plots_raw = false;
};

// Flag-value parsers shared by the front end and the JSON config file.
std::vector<std::string> parse_measures(const std::string& text);
timeseries::ScalePolicy parse_scale_policy(const std::string& text);
std::vector<std::pair<std::string, timeseries::Direction>> parse_directions(
    const std::string& text);
postopt::CriteriaOrder parse_criteria_order(const std::string& text);

/// Loads a JSON config file into `config` (keys mirror the flag names).
/// Values later overridden by explicit flags.
void apply_config_file(RunConfig& config, const std::filesystem::path& file);

struct LoadedProblem {
  timeseries::TimeSeriesTensor tensor;
  timeseries::MeasureTensor measures;
  disagg::RankingChain ranking;
};

/// Reads and validates the tensor + ranking named by the config.
LoadedProblem load_problem(const RunConfig& config);

/// Commands.  Each returns the process exit code (0 success, 2 input or
/// validation, 3 I/O, 4 solver/internal) and reports failures as a
/// machine-readable JSON error object on stderr.  Outputs are written
/// atomically into config.output_dir.
int cmd_fit(const RunConfig& config);       ///< model.json, report.json, plots
int cmd_postopt(const RunConfig& config);   ///< postopt.json
int cmd_simulate(const RunConfig& config);  ///< ensemble.json

}  // namespace utat::cli
