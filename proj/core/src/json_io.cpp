#include "utat/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace utat::jsonio {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string policy_string(const timeseries::ScalePolicy& policy) {
  if (policy.kind == timeseries::ScalePolicy::Kind::observed_values) return "observed";
  return "equal:" + std::to_string(policy.alpha);
}

timeseries::ScalePolicy policy_from_string(const std::string& text) {
  if (text == "observed") return timeseries::ScalePolicy::observed();
  if (text.rfind("equal:", 0) == 0) {
    try {
      const int alpha = std::stoi(text.substr(6));
      if (alpha >= 2) return timeseries::ScalePolicy::equal(alpha);
    } catch (const std::exception&) {
    }
  }
  throw Error("validation-error", "invalid scale policy '" + text + "' (observed, equal:<alpha>)");
}

ordered_json weights_json(const std::vector<std::vector<std::vector<double>>>& w) {
  ordered_json out = ordered_json::array();
  for (const auto& per_measure : w) {
    ordered_json row = ordered_json::array();
    for (const auto& per_criterion : per_measure) row.push_back(per_criterion);
    out.push_back(std::move(row));
  }
  return out;
}

/// Splits a flat weight vector into the model's [measure][criterion][segment]
/// shape (segment counts taken from the model's own weight table).
ordered_json nest_like_model(const disagg::ValueModel& model, const std::vector<double>& flat) {
  ordered_json out = ordered_json::array();
  std::size_t pos = 0;
  for (const auto& per_measure : model.w) {
    ordered_json row = ordered_json::array();
    for (const auto& per_criterion : per_measure) {
      ordered_json seg = ordered_json::array();
      for (std::size_t l = 0; l < per_criterion.size(); ++l) seg.push_back(flat[pos++]);
      row.push_back(std::move(seg));
    }
    out.push_back(std::move(row));
  }
  return out;
}

const ordered_json& require(const ordered_json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end()) {
    throw Error("validation-error", std::string("model document missing key '") + key + "'");
  }
  return *it;
}

}  // namespace

std::string model_to_json(const disagg::ValueModel& model) {
  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["measures"] = model.measures;

  ordered_json criteria = ordered_json::array();
  for (const auto& spec : model.criteria) {
    criteria.push_back(ordered_json{
        {"id", spec.id},
        {"direction", spec.direction == timeseries::Direction::maximize ? "max" : "min"}});
  }
  doc["criteria"] = std::move(criteria);

  doc["alternatives"] = model.alternatives;
  doc["reference"] = model.reference;
  doc["scale_policy"] = policy_string(model.scale_policy);

  ordered_json scales = ordered_json::array();
  for (std::size_t k = 0; k < model.scales.size(); ++k) {
    for (std::size_t j = 0; j < model.scales[k].size(); ++j) {
      scales.push_back(ordered_json{{"measure", model.measures[k]},
                                    {"criterion", model.criteria[j].id},
                                    {"breakpoints", model.scales[k][j].breakpoints}});
    }
  }
  doc["scales"] = std::move(scales);

  doc["weights"] = weights_json(model.w);

  ordered_json sp = ordered_json::object();
  ordered_json sm = ordered_json::object();
  for (std::size_t r = 0; r < model.reference.size(); ++r) {
    sp[model.reference[r]] = model.sigma_plus[r];
    sm[model.reference[r]] = model.sigma_minus[r];
  }
  doc["sigma_plus"] = std::move(sp);
  doc["sigma_minus"] = std::move(sm);

  doc["z"] = model.z;
  doc["config"] = ordered_json{{"variant", disagg::variant_name(model.config.variant)},
                               {"delta", model.config.delta},
                               {"epsilon", model.config.epsilon},
                               {"gamma", model.config.gamma}};
  return doc.dump(2) + "\n";
}

disagg::ValueModel model_from_json(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error("parse-error", std::string("model document: ") + e.what());
  }
  try {
    if (require(doc, "schema_version").get<int>() != kSchemaVersion) {
      throw Error("validation-error", "unsupported model schema_version");
    }

    disagg::ValueModel model;
    model.measures = require(doc, "measures").get<std::vector<std::string>>();
    for (const auto& item : require(doc, "criteria")) {
      timeseries::CriterionSpec spec;
      spec.id = require(item, "id").get<std::string>();
      const std::string dir = require(item, "direction").get<std::string>();
      if (dir != "max" && dir != "min") {
        throw Error("validation-error", "criterion direction must be 'max' or 'min'");
      }
      spec.direction =
          dir == "max" ? timeseries::Direction::maximize : timeseries::Direction::minimize;
      model.criteria.push_back(std::move(spec));
    }
    model.alternatives = require(doc, "alternatives").get<std::vector<std::string>>();
    model.reference = require(doc, "reference").get<std::vector<std::string>>();
    model.scale_policy = policy_from_string(require(doc, "scale_policy").get<std::string>());

    const std::size_t h = model.measures.size();
    const std::size_t n = model.criteria.size();
    model.scales.assign(h, std::vector<timeseries::ScaleGrid>(n));
    std::vector<std::vector<bool>> seen(h, std::vector<bool>(n, false));
    for (const auto& item : require(doc, "scales")) {
      const std::string measure = require(item, "measure").get<std::string>();
      const std::string criterion = require(item, "criterion").get<std::string>();
      std::size_t k = h, j = n;
      for (std::size_t q = 0; q < h; ++q) {
        if (model.measures[q] == measure) k = q;
      }
      for (std::size_t q = 0; q < n; ++q) {
        if (model.criteria[q].id == criterion) j = q;
      }
      if (k == h || j == n) {
        throw Error("validation-error",
                    "scale row names unknown pair (" + measure + ", " + criterion + ")");
      }
      timeseries::ScaleGrid grid;
      grid.breakpoints = require(item, "breakpoints").get<std::vector<double>>();
      grid.policy = model.scale_policy;
      if (grid.breakpoints.size() < 2) {
        throw Error("validation-error", "scale grids need at least 2 breakpoints");
      }
      for (std::size_t b = 1; b < grid.breakpoints.size(); ++b) {
        if (!(grid.breakpoints[b - 1] < grid.breakpoints[b])) {
          throw Error("validation-error", "scale breakpoints must be strictly increasing");
        }
      }
      model.scales[k][j] = std::move(grid);
      seen[k][j] = true;
    }
    for (std::size_t k = 0; k < h; ++k) {
      for (std::size_t j = 0; j < n; ++j) {
        if (!seen[k][j]) {
          throw Error("validation-error",
                      "model document is missing the scale for (" + model.measures[k] + ", " +
                          model.criteria[j].id + ")");
        }
      }
    }

    model.w = require(doc, "weights").get<std::vector<std::vector<std::vector<double>>>>();
    if (model.w.size() != h) {
      throw Error("validation-error", "weights outer dimension must match measures");
    }
    for (std::size_t k = 0; k < h; ++k) {
      if (model.w[k].size() != n) {
        throw Error("validation-error", "weights middle dimension must match criteria");
      }
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t segments = model.scales[k][j].breakpoints.size() - 1;
        if (model.w[k][j].size() != segments) {
          throw Error("validation-error",
                      "weight segment count must be one less than the breakpoint count");
        }
      }
    }

    const ordered_json& sp = require(doc, "sigma_plus");
    const ordered_json& sm = require(doc, "sigma_minus");
    for (const auto& id : model.reference) {
      const auto pit = sp.find(id);
      const auto mit = sm.find(id);
      if (pit == sp.end() || mit == sm.end()) {
        throw Error("validation-error", "error terms missing for reference alternative " + id);
      }
      model.sigma_plus.push_back(pit->get<double>());
      model.sigma_minus.push_back(mit->get<double>());
    }

    model.z = require(doc, "z").get<double>();
    const ordered_json& config = require(doc, "config");
    model.config.variant = disagg::variant_from_name(require(config, "variant").get<std::string>());
    model.config.delta = require(config, "delta").get<double>();
    model.config.epsilon = require(config, "epsilon").get<double>();
    model.config.gamma = require(config, "gamma").get<double>();
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error("validation-error", std::string("model document: ") + e.what());
  }
}

disagg::ValueModel load_model(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    throw Error("input-not-found", "cannot open model file: " + file.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) {
    throw Error("io-error", "failed reading model file: " + file.string(), 3);
  }
  return model_from_json(buffer.str());
}

std::string ensemble_to_json(const postopt::SolutionEnsemble& ensemble,
                             const disagg::ValueModel& model) {
  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["iterations"] = ensemble.iterations;
  doc["seed"] = ensemble.seed;
  if (ensemble.order) {
    doc["order"] = ensemble.order->ids;
    doc["scheme"] = postopt::scheme_name(ensemble.scheme);
  }
  ordered_json entries = ordered_json::array();
  for (const auto& entry : ensemble.entries) {
    entries.push_back(ordered_json{{"w", nest_like_model(model, entry.w)},
                                   {"count", entry.count},
                                   {"objective", entry.objective}});
  }
  doc["entries"] = std::move(entries);
  doc["weighted_average"] = nest_like_model(model, ensemble.weighted_average);
  return doc.dump(2) + "\n";
}

std::string minmax_to_json(const postopt::MinMaxReport& report, const disagg::ValueModel& model) {
  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["z"] = model.z;
  doc["gamma"] = model.config.gamma;
  ordered_json rows = ordered_json::array();
  for (const auto& row : report.rows) {
    rows.push_back(ordered_json{{"measure", row.measure},
                                {"criterion", row.criterion},
                                {"min", row.min},
                                {"max", row.max},
                                {"average", row.average}});
  }
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

std::string error_to_json(const Error& error) {
  ordered_json obj;
  obj["code"] = error.code;
  obj["message"] = error.what();
  if (error.line >= 0) obj["line"] = error.line;
  if (error.column >= 0) obj["column"] = error.column;
  return ordered_json{{"error", std::move(obj)}}.dump() + "\n";
}

void write_atomic(const std::filesystem::path& file, const std::string& content) {
  const std::filesystem::path tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error("io-error", "cannot open for writing: " + tmp.string(), 3);
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error("io-error", "failed writing: " + tmp.string(), 3);
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, file, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error("io-error", "failed moving output into place: " + file.string(), 3);
  }
}

}  // namespace utat::jsonio
