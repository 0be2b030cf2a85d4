#include "utat/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "utat/errors.hpp"
#include "utat/json_io.hpp"
#include "utat/svg.hpp"

namespace utat::cli {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

}  // namespace

std::vector<std::string> parse_measures(const std::string& text) {
  std::vector<std::string> measures = split_list(text, ',');
  measures.erase(std::remove(measures.begin(), measures.end(), std::string{}), measures.end());
  if (measures.empty()) {
    throw Error("validation-error", "measures list must name at least one measure");
  }
  return measures;
}

timeseries::ScalePolicy parse_scale_policy(const std::string& text) {
  const std::string t = trim(text);
  if (t == "observed") return timeseries::ScalePolicy::observed();
  if (t.rfind("equal:", 0) == 0) {
    const std::string num = t.substr(6);
    try {
      std::size_t used = 0;
      const int alpha = std::stoi(num, &used);
      if (used == num.size() && alpha >= 2) return timeseries::ScalePolicy::equal(alpha);
    } catch (const std::exception&) {
    }
    throw Error("validation-error", "equal-interval scale needs an integer grade count >= 2");
  }
  throw Error("validation-error", "invalid scale policy '" + t + "' (observed, equal:<alpha>)");
}

std::vector<std::pair<std::string, timeseries::Direction>> parse_directions(
    const std::string& text) {
  std::vector<std::pair<std::string, timeseries::Direction>> out;
  for (const std::string& item : split_list(text, ',')) {
    if (item.empty()) continue;
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos) {
      throw Error("validation-error", "direction entries look like 'criterion=max' or '=min'");
    }
    const std::string id = trim(item.substr(0, eq));
    const std::string dir = trim(item.substr(eq + 1));
    if (id.empty() || (dir != "max" && dir != "min")) {
      throw Error("validation-error", "invalid direction entry '" + item + "'");
    }
    out.emplace_back(id, dir == "max" ? timeseries::Direction::maximize
                                      : timeseries::Direction::minimize);
  }
  if (out.empty()) {
    throw Error("validation-error", "directions list must not be empty");
  }
  return out;
}

postopt::CriteriaOrder parse_criteria_order(const std::string& text) {
  postopt::CriteriaOrder order;
  for (const std::string& item : split_list(text, '>')) {
    if (item.empty()) {
      throw Error("validation-error", "criteria order has an empty entry: '" + text + "'");
    }
    order.ids.push_back(item);
  }
  if (order.ids.empty()) {
    throw Error("validation-error", "criteria order must name at least one criterion");
  }
  return order;
}

void apply_config_file(RunConfig& config, const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    throw Error("input-not-found", "cannot open config file: " + file.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  ordered_json doc;
  try {
    doc = ordered_json::parse(buffer.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error("parse-error", "config file " + file.string() + ": " + e.what());
  }
  if (!doc.is_object()) {
    throw Error("validation-error", "config file must hold a JSON object");
  }
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "tensor") {
        config.tensor_path = value.get<std::string>();
      } else if (key == "ranking") {
        config.ranking_path = value.get<std::string>();
      } else if (key == "output") {
        config.output_dir = value.get<std::string>();
      } else if (key == "model") {
        config.model_path = value.get<std::string>();
      } else if (key == "measures") {
        if (value.is_array()) {
          config.measures = value.get<std::vector<std::string>>();
          if (config.measures.empty()) {
            throw Error("validation-error", "config 'measures' must not be empty");
          }
        } else {
          config.measures = parse_measures(value.get<std::string>());
        }
      } else if (key == "scale_policy") {
        config.scale_policy = parse_scale_policy(value.get<std::string>());
      } else if (key == "directions") {
        config.directions = parse_directions(value.get<std::string>());
      } else if (key == "delta") {
        config.disagg.delta = value.get<double>();
      } else if (key == "epsilon") {
        config.disagg.epsilon = value.get<double>();
      } else if (key == "gamma") {
        config.disagg.gamma = value.get<double>();
      } else if (key == "variant") {
        config.disagg.variant = disagg::variant_from_name(value.get<std::string>());
      } else if (key == "iterations") {
        config.iterations = value.get<long long>();
      } else if (key == "seed") {
        config.seed = value.get<std::uint64_t>();
      } else if (key == "criteria_order") {
        if (value.is_array()) {
          postopt::CriteriaOrder order;
          order.ids = value.get<std::vector<std::string>>();
          config.criteria_order = std::move(order);
        } else {
          config.criteria_order = parse_criteria_order(value.get<std::string>());
        }
      } else if (key == "order_scheme") {
        config.order_scheme = postopt::scheme_from_name(value.get<std::string>());
      } else if (key == "threads") {
        config.threads = value.get<int>();
      } else if (key == "plots") {
        config.plots = value.get<bool>();
      } else if (key == "plots_raw") {
        config.plots_raw = value.get<bool>();
      } else {
        throw Error("validation-error", "config file has unknown key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error("validation-error", "config file " + file.string() + ": " + e.what());
  }
}

LoadedProblem load_problem(const RunConfig& config) {
  LoadedProblem problem;
  problem.tensor = timeseries::load_tensor(config.tensor_path);
  if (!config.directions.empty()) {
    timeseries::set_directions(problem.tensor, config.directions);
  }

  std::ifstream in(config.ranking_path, std::ios::binary);
  if (!in) {
    throw Error("input-not-found", "cannot open ranking file: " + config.ranking_path.string());
  }
  std::string line, chain_line;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) {
      chain_line = line;
      break;
    }
  }
  if (chain_line.empty()) {
    throw Error("validation-error", "ranking file is empty: " + config.ranking_path.string());
  }
  problem.ranking = disagg::RankingChain::parse(chain_line);

  problem.measures = timeseries::extract_measures(problem.tensor, config.measures,
                                                  config.scale_policy);
  return problem;
}

namespace {

std::string fmt4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

/// Verifies that a reloaded model was fit on (a dataset indistinguishable
/// from) the tensor at hand, so the generated polyhedron matches the model.
void check_model_matches(const disagg::ValueModel& model,
                         const timeseries::MeasureTensor& measures) {
  bool ok = model.measures == measures.measures &&
            model.criteria.size() == measures.criteria.size() &&
            model.alternatives == measures.alternatives;
  if (ok) {
    for (std::size_t j = 0; j < model.criteria.size(); ++j) {
      ok = ok && model.criteria[j].id == measures.criteria[j].id &&
           model.criteria[j].direction == measures.criteria[j].direction;
    }
  }
  if (ok) {
    for (int k = 0; ok && k < measures.h(); ++k) {
      for (int j = 0; ok && j < measures.n(); ++j) {
        ok = model.scales[k][j].breakpoints == measures.scales[k][j].breakpoints;
      }
    }
  }
  if (!ok) {
    throw Error("validation-error",
                "model file does not match the tensor (measures, criteria, or scales differ)");
  }
}

/// Flattens the tie groups of a model ranking, ordering tied reference
/// alternatives by their position in the decision-maker's chain.
std::vector<std::string> flatten_ranking(const std::vector<disagg::RankedGroup>& groups,
                                         const std::vector<std::string>& reference) {
  std::map<std::string, int> dm_pos;
  for (std::size_t r = 0; r < reference.size(); ++r) dm_pos[reference[r]] = static_cast<int>(r);
  std::vector<std::string> flat;
  for (const auto& group : groups) {
    std::vector<std::string> ids = group.ids;
    std::stable_sort(ids.begin(), ids.end(), [&](const std::string& a, const std::string& b) {
      const auto ia = dm_pos.find(a);
      const auto ib = dm_pos.find(b);
      const int ra = ia == dm_pos.end() ? std::numeric_limits<int>::max() : ia->second;
      const int rb = ib == dm_pos.end() ? std::numeric_limits<int>::max() : ib->second;
      return ra < rb;
    });
    flat.insert(flat.end(), ids.begin(), ids.end());
  }
  return flat;
}

disagg::ValueModel fitted_model(const RunConfig& config, const LoadedProblem& problem) {
  if (config.model_path) {
    disagg::ValueModel model = jsonio::load_model(*config.model_path);
    check_model_matches(model, problem.measures);
    // Post-optimization slack parameters come from the current run, not from
    // the fit that produced the model.
    model.config.epsilon = config.disagg.epsilon;
    model.config.gamma = config.disagg.gamma;
    return model;
  }
  return disagg::fit(problem.measures, problem.ranking, config.disagg);
}

void ensure_output_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw Error("io-error", "cannot create output directory: " + dir.string(), 3);
  }
}

ordered_json config_echo(const disagg::DisaggConfig& config) {
  return ordered_json{{"variant", disagg::variant_name(config.variant)},
                      {"delta", config.delta},
                      {"epsilon", config.epsilon},
                      {"gamma", config.gamma}};
}

int run_guarded(const char* fallback, int (*body)(const RunConfig&), const RunConfig& config) {
  try {
    return body(config);
  } catch (const Error& e) {
    std::cerr << jsonio::error_to_json(e);
    return e.exit_code;
  } catch (const std::exception& e) {
    std::cerr << jsonio::error_to_json(Error("internal-error",
                                             std::string(fallback) + ": " + e.what(), 4));
    return 4;
  }
}

int fit_body(const RunConfig& config) {
  const LoadedProblem problem = load_problem(config);
  const disagg::ValueModel model = disagg::fit(problem.measures, problem.ranking, config.disagg);
  ensure_output_dir(config.output_dir);
  jsonio::write_atomic(config.output_dir / "model.json", jsonio::model_to_json(model));

  const std::vector<disagg::RankedGroup> groups =
      disagg::rank_alternatives(model, problem.measures);
  const std::vector<std::string> flat = flatten_ranking(groups, model.reference);

  std::vector<std::string> model_ref_order;
  for (const auto& id : flat) {
    if (std::find(model.reference.begin(), model.reference.end(), id) != model.reference.end()) {
      model_ref_order.push_back(id);
    }
  }
  const disagg::TauResult tau = disagg::kendall_tau(model.reference, model_ref_order);

  ordered_json report;
  report["schema_version"] = jsonio::kSchemaVersion;
  report["z"] = model.z;
  report["dm_ranking"] = model.reference;
  ordered_json ranking = ordered_json::array();
  for (const auto& group : groups) ranking.push_back(group.ids);
  report["model_ranking"] = std::move(ranking);
  report["kendall_tau"] = ordered_json{
      {"tau", tau.tau}, {"concordant", tau.concordant}, {"discordant", tau.discordant}};

  ordered_json globals = ordered_json::array();
  for (const auto& id : flat) {
    globals.push_back(ordered_json{
        {"alternative", id}, {"value", disagg::global_value(model, problem.measures, id)}});
  }
  report["global_values"] = std::move(globals);

  ordered_json nonzero = ordered_json::array();
  for (std::size_t k = 0; k < model.w.size(); ++k) {
    for (std::size_t j = 0; j < model.w[k].size(); ++j) {
      for (std::size_t l = 0; l < model.w[k][j].size(); ++l) {
        if (model.w[k][j][l] > 5e-7) {
          nonzero.push_back(ordered_json{{"measure", model.measures[k]},
                                         {"criterion", model.criteria[j].id},
                                         {"segment", l + 1},
                                         {"value", model.w[k][j][l]}});
        }
      }
    }
  }
  report["nonzero_weights"] = std::move(nonzero);
  report["weights"] = ordered_json::parse(jsonio::model_to_json(model))["weights"];
  report["config"] = config_echo(model.config);
  jsonio::write_atomic(config.output_dir / "report.json", report.dump(2) + "\n");

  if (config.plots || config.plots_raw) {
    for (std::size_t k = 0; k < model.w.size(); ++k) {
      for (std::size_t j = 0; j < model.w[k].size(); ++j) {
        const std::string stem =
            "value_k" + std::to_string(k + 1) + "_c" + std::to_string(j + 1);
        if (config.plots) {
          jsonio::write_atomic(config.output_dir / (stem + ".svg"),
                               svg::render_marginal(model, static_cast<int>(k),
                                                    static_cast<int>(j), true));
        }
        if (config.plots_raw) {
          jsonio::write_atomic(config.output_dir / (stem + "_raw.svg"),
                               svg::render_marginal(model, static_cast<int>(k),
                                                    static_cast<int>(j), false));
        }
      }
    }
  }

  std::cout << "z = " << fmt4(model.z) << ", kendall tau = " << fmt4(tau.tau) << "\n";
  std::cout << "model ranking:";
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t i = 0; i < groups[g].ids.size(); ++i) {
      std::cout << (g + i == 0 ? " " : (i == 0 ? " > " : " ~ ")) << groups[g].ids[i];
    }
  }
  std::cout << "\n";
  return 0;
}

int postopt_body(const RunConfig& config) {
  const LoadedProblem problem = load_problem(config);
  const disagg::ValueModel model = fitted_model(config, problem);
  const postopt::MinMaxReport report =
      postopt::classical_minmax(problem.measures, problem.ranking, model.config, model);
  ensure_output_dir(config.output_dir);
  jsonio::write_atomic(config.output_dir / "postopt.json", jsonio::minmax_to_json(report, model));

  std::cout << "measure     criterion   min      max      average\n";
  for (const auto& row : report.rows) {
    std::printf("%-11s %-11s %s   %s   %s\n", row.measure.c_str(), row.criterion.c_str(),
                fmt4(row.min).c_str(), fmt4(row.max).c_str(), fmt4(row.average).c_str());
  }
  return 0;
}

int simulate_body(const RunConfig& config) {
  if (config.iterations < 1) {
    throw Error("validation-error", "iterations must be >= 1");
  }
  const LoadedProblem problem = load_problem(config);
  const disagg::ValueModel model = fitted_model(config, problem);

  postopt::SimOptions options;
  options.iterations = config.iterations;
  options.seed = config.seed;
  options.order = config.criteria_order;
  options.scheme = config.order_scheme;
  options.threads = config.threads;

  const postopt::SolutionEnsemble ensemble =
      postopt::mo_simulate(problem.measures, problem.ranking, model.config, model, options);
  ensure_output_dir(config.output_dir);
  jsonio::write_atomic(config.output_dir / "ensemble.json",
                       jsonio::ensemble_to_json(ensemble, model));

  // Summary table: one column per distinct solution plus the weighted
  // average, one row per weight coordinate that is nonzero anywhere.
  const disagg::ProgramLayout layout =
      disagg::layout_for(problem.measures, problem.ranking, model.config);
  const std::size_t n_entries = ensemble.entries.size();
  std::cout << ensemble.iterations << " iterations, " << n_entries << " distinct solutions\n";

  std::printf("%-18s", "");
  for (std::size_t e = 0; e < n_entries; ++e) std::printf(" s%-7zu", e + 1);
  std::printf(" %-8s\n", "wa");
  std::printf("%-18s", "count");
  for (const auto& entry : ensemble.entries) std::printf(" %-8lld", entry.count);
  std::printf("\n");

  for (int k = 0; k < problem.measures.h(); ++k) {
    for (int j = 0; j < problem.measures.n(); ++j) {
      for (int l = 0; l < layout.w_count[k][j]; ++l) {
        const int idx = layout.w_index(k, j, l);
        bool nonzero = ensemble.weighted_average[idx] > 5e-7;
        for (const auto& entry : ensemble.entries) nonzero = nonzero || entry.w[idx] > 5e-7;
        if (!nonzero) continue;
        const std::string label = "w[" + problem.measures.measures[k] + "][" +
                                  problem.measures.criteria[j].id + "][" +
                                  std::to_string(l + 1) + "]";
        std::printf("%-18s", label.c_str());
        for (const auto& entry : ensemble.entries) std::printf(" %-8s", fmt4(entry.w[idx]).c_str());
        std::printf(" %-8s\n", fmt4(ensemble.weighted_average[idx]).c_str());
      }
    }
  }
  return 0;
}

}  // namespace

int cmd_fit(const RunConfig& config) { return run_guarded("fit", fit_body, config); }

int cmd_postopt(const RunConfig& config) { return run_guarded("postopt", postopt_body, config); }

int cmd_simulate(const RunConfig& config) {
  return run_guarded("simulate", simulate_body, config);
}

}  // namespace utat::cli
