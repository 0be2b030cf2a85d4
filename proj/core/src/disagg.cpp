#include "utat/disagg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "utat/errors.hpp"

namespace utat::disagg {

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::uta: return "uta";
    case Variant::utastar: return "utastar";
    case Variant::utastar_t: return "utastar-t";
  }
  return "utastar-t";
}

Variant variant_from_name(const std::string& name) {
  if (name == "uta") return Variant::uta;
  if (name == "utastar") return Variant::utastar;
  if (name == "utastar-t" || name == "utastar_t") return Variant::utastar_t;
  throw Error("validation-error", "unknown variant '" + name + "' (uta, utastar, utastar-t)");
}

RankingChain RankingChain::parse(const std::string& line) {
  RankingChain chain;
  std::string token;
  long token_start = 1;
  bool token_seen = false;

  auto flush = [&](long at_column) {
    // trim
    auto b = token.find_first_not_of(" \t\r");
    auto e = token.find_last_not_of(" \t\r");
    if (b == std::string::npos) {
      throw Error("parse-error", "expected alternative identifier").at(1, at_column);
    }
    chain.order.push_back(token.substr(b, e - b + 1));
    token.clear();
    token_seen = false;
  };

  for (std::size_t p = 0; p < line.size(); ++p) {
    const char ch = line[p];
    if (ch == '>' || ch == '~') {
      flush(token_seen ? token_start : static_cast<long>(p) + 1);
      chain.links.push_back(ch == '>' ? Link::strict : Link::indifferent);
      token_start = static_cast<long>(p) + 2;
    } else {
      if (!token_seen && ch != ' ' && ch != '\t' && ch != '\r') {
        token_seen = true;
        token_start = static_cast<long>(p) + 1;
      }
      token.push_back(ch);
    }
  }
  flush(token_seen ? token_start : static_cast<long>(line.size()) + 1);

  if (chain.order.size() < 2) {
    throw Error("validation-error", "ranking must contain at least 2 alternatives");
  }
  std::set<std::string> seen;
  for (const auto& id : chain.order) {
    if (!seen.insert(id).second) {
      throw Error("validation-error", "alternative '" + id + "' appears twice in the ranking");
    }
  }
  return chain;
}

namespace {

void validate_inputs(const timeseries::MeasureTensor& measures, const RankingChain& ranking,
                     const DisaggConfig& config) {
  if (config.delta <= 0.0) throw Error("validation-error", "delta must be positive");
  if (config.epsilon < 0.0) throw Error("validation-error", "epsilon must be non-negative");
  if (config.gamma < 0.0) throw Error("validation-error", "gamma must be non-negative");
  if (ranking.order.size() < 2) {
    throw Error("validation-error", "ranking must contain at least 2 alternatives");
  }
  if (config.variant != Variant::utastar_t && measures.h() != 1) {
    throw Error("validation-error", "variant '" + variant_name(config.variant) +
                                        "' needs exactly one descriptive measure, got " +
                                        std::to_string(measures.h()));
  }
  for (const auto& id : ranking.order) {
    if (measures.alternative_index(id) < 0) {
      throw Error("unknown-alternative", "ranking names unknown alternative '" + id + "'");
    }
  }
}

// Accumulates the expansion of one alternative's global value over the
// flat weight block: each marginal value is the cumulative sum of the step
// weights below the located segment plus the in-segment fraction.
void accumulate_value(const timeseries::MeasureTensor& measures, const ProgramLayout& layout,
                      int i, double factor, std::vector<double>& acc) {
  for (int k = 0; k < measures.h(); ++k) {
    for (int j = 0; j < measures.n(); ++j) {
      const auto [seg, theta] = timeseries::locate(measures.scales[k][j], measures.at(i, j, k));
      for (int l = 0; l < seg - 1; ++l) acc[layout.w_index(k, j, l)] += factor;
      if (theta != 0.0) acc[layout.w_index(k, j, seg - 1)] += factor * theta;
    }
  }
}

}  // namespace

ProgramLayout layout_for(const timeseries::MeasureTensor& measures, const RankingChain& ranking,
                         const DisaggConfig& config) {
  validate_inputs(measures, ranking, config);
  const int h = measures.h(), n = measures.n();
  ProgramLayout layout;
  layout.w_offset.assign(h, std::vector<int>(n, 0));
  layout.w_count.assign(h, std::vector<int>(n, 0));
  int next = 0;
  for (int k = 0; k < h; ++k) {
    for (int j = 0; j < n; ++j) {
      layout.w_offset[k][j] = next;
      layout.w_count[k][j] = measures.scales[k][j].alpha() - 1;
      next += layout.w_count[k][j];
    }
  }
  layout.n_w = next;
  const int R = static_cast<int>(ranking.order.size());
  if (config.variant == Variant::uta) {
    layout.sigma_plus_begin = -1;
    layout.sigma_minus_begin = next;
    layout.total = next + R;
  } else {
    layout.sigma_plus_begin = next;
    layout.sigma_minus_begin = next + R;
    layout.total = next + 2 * R;
  }
  return layout;
}

lp::LinearProgram build_program(const timeseries::MeasureTensor& measures,
                                const RankingChain& ranking, const DisaggConfig& config) {
  const ProgramLayout layout = layout_for(measures, ranking, config);
  const int h = measures.h(), n = measures.n();
  const int R = static_cast<int>(ranking.order.size());
  const bool double_error = config.variant != Variant::uta;

  lp::LinearProgram lp;
  for (int k = 0; k < h; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int l = 0; l < layout.w_count[k][j]; ++l) {
        std::string name = "w[";
        if (config.variant == Variant::utastar_t) name += std::to_string(k + 1) + "][";
        name += std::to_string(j + 1) + "][" + std::to_string(l + 1) + "]";
        lp.add_variable(std::move(name));
      }
    }
  }
  if (double_error) {
    for (const auto& id : ranking.order) lp.add_variable("sp[" + id + "]");
    for (const auto& id : ranking.order) lp.add_variable("sm[" + id + "]");
  } else {
    for (const auto& id : ranking.order) lp.add_variable("s[" + id + "]");
  }

  std::vector<double> objective(layout.total, 0.0);
  for (int v = layout.n_w; v < layout.total; ++v) objective[v] = 1.0;
  lp.set_objective(lp::Sense::minimize, std::move(objective));

  // One pairwise row per consecutive ranking pair.
  std::vector<double> acc(layout.n_w);
  for (int r = 0; r + 1 < R; ++r) {
    const int i_hi = measures.alternative_index(ranking.order[r]);
    const int i_lo = measures.alternative_index(ranking.order[r + 1]);
    std::fill(acc.begin(), acc.end(), 0.0);
    accumulate_value(measures, layout, i_hi, +1.0, acc);
    accumulate_value(measures, layout, i_lo, -1.0, acc);

    std::vector<std::pair<int, double>> terms;
    for (int v = 0; v < layout.n_w; ++v) {
      if (acc[v] != 0.0) terms.emplace_back(v, acc[v]);
    }
    if (double_error) {
      terms.emplace_back(layout.sigma_plus_begin + r, -1.0);
      terms.emplace_back(layout.sigma_minus_begin + r, +1.0);
      terms.emplace_back(layout.sigma_plus_begin + r + 1, +1.0);
      terms.emplace_back(layout.sigma_minus_begin + r + 1, -1.0);
    } else {
      terms.emplace_back(layout.sigma_minus_begin + r, +1.0);
      terms.emplace_back(layout.sigma_minus_begin + r + 1, -1.0);
    }

    const bool strict = ranking.links[r] == Link::strict;
    lp.add_constraint(std::move(terms), strict ? lp::Relation::ge : lp::Relation::eq,
                      strict ? config.delta : 0.0,
                      "pair[" + ranking.order[r] + (strict ? ">" : "~") + ranking.order[r + 1] +
                          "]");
  }

  // One normalization equality per measure.
  for (int k = 0; k < h; ++k) {
    std::vector<std::pair<int, double>> terms;
    for (int j = 0; j < n; ++j) {
      for (int l = 0; l < layout.w_count[k][j]; ++l) {
        terms.emplace_back(layout.w_index(k, j, l), 1.0);
      }
    }
    lp.add_constraint(std::move(terms), lp::Relation::eq, 1.0, "norm[" + measures.measures[k] + "]");
  }
  return lp;
}

ValueModel fit(const timeseries::MeasureTensor& measures, const RankingChain& ranking,
               const DisaggConfig& config) {
  const ProgramLayout layout = layout_for(measures, ranking, config);
  const lp::LinearProgram program = build_program(measures, ranking, config);
  const lp::LpSolution sol = lp::solve(program);
  if (sol.status == lp::SolveStatus::numerical_failure) {
    throw Error("solver-failure", "simplex broke down on the disaggregation program", 4);
  }
  if (sol.status != lp::SolveStatus::optimal) {
    // The program always admits a feasible bounded optimum by construction.
    throw Error("internal-error", "disaggregation program was not optimal (status " +
                                      std::to_string(static_cast<int>(sol.status)) + ")",
                4);
  }

  ValueModel model;
  model.measures = measures.measures;
  model.criteria = measures.criteria;
  model.alternatives = measures.alternatives;
  model.scales = measures.scales;
  model.w = unflatten_w(layout, sol.values);
  model.reference = ranking.order;
  const int R = static_cast<int>(ranking.order.size());
  model.sigma_plus.assign(R, 0.0);
  model.sigma_minus.assign(R, 0.0);
  for (int r = 0; r < R; ++r) {
    if (layout.sigma_plus_begin >= 0) {
      model.sigma_plus[r] = sol.values[layout.sigma_plus_begin + r];
    }
    model.sigma_minus[r] = sol.values[layout.sigma_minus_begin + r];
  }
  model.z = sol.objective;
  model.config = config;
  model.scale_policy = measures.policy;
  return model;
}

double marginal_value(const ValueModel& model, int k, int j, double x) {
  const auto [seg, theta] = timeseries::locate(model.scales[k][j], x);
  const auto& steps = model.w[k][j];
  double u = 0.0;
  for (int l = 0; l < seg - 1; ++l) u += steps[l];
  if (theta != 0.0) u += theta * steps[seg - 1];
  return u;
}

double global_value(const ValueModel& model, const timeseries::MeasureTensor& measures,
                    const std::string& alternative) {
  const int i = measures.alternative_index(alternative);
  if (i < 0) throw Error("unknown-alternative", "unknown alternative '" + alternative + "'");
  double total = 0.0;
  for (int k = 0; k < measures.h(); ++k) {
    for (int j = 0; j < measures.n(); ++j) {
      total += marginal_value(model, k, j, measures.at(i, j, k));
    }
  }
  return total;
}

std::vector<RankedGroup> rank_alternatives(const ValueModel& model,
                                           const timeseries::MeasureTensor& measures) {
  const int m = measures.m();
  std::vector<std::pair<double, int>> scored(m);
  for (int i = 0; i < m; ++i) {
    scored[i] = {global_value(model, measures, measures.alternatives[i]), i};
  }
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    return a.first > b.first;  // descending value, tensor order within ties
  });

  std::vector<RankedGroup> groups;
  for (const auto& [value, idx] : scored) {
    if (groups.empty() || std::fabs(groups.back().value - value) > 1e-9) {
      groups.push_back({value, {}});
    }
    groups.back().ids.push_back(measures.alternatives[idx]);
  }
  return groups;
}

TauResult kendall_tau(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.size() != b.size()) {
    throw Error("validation-error", "rankings compare different numbers of alternatives");
  }
  std::map<std::string, int> pos_b;
  for (std::size_t i = 0; i < b.size(); ++i) pos_b[b[i]] = static_cast<int>(i);
  if (pos_b.size() != b.size()) {
    throw Error("validation-error", "ranking contains duplicate identifiers");
  }
  for (const auto& id : a) {
    if (!pos_b.count(id)) {
      throw Error("validation-error", "rankings cover different identifier sets ('" + id + "')");
    }
  }

  const long n = static_cast<long>(a.size());
  long discordant = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      if (pos_b[a[i]] > pos_b[a[j]]) ++discordant;
    }
  }
  const long total = n * (n - 1) / 2;
  TauResult result;
  result.discordant = discordant;
  result.concordant = total - discordant;
  result.tau = total == 0 ? 1.0
                          : static_cast<double>(result.concordant - result.discordant) /
                                static_cast<double>(total);
  return result;
}

std::vector<std::vector<std::vector<double>>> unflatten_w(const ProgramLayout& layout,
                                                          const std::vector<double>& x) {
  std::vector<std::vector<std::vector<double>>> w(layout.w_offset.size());
  for (std::size_t k = 0; k < layout.w_offset.size(); ++k) {
    w[k].resize(layout.w_offset[k].size());
    for (std::size_t j = 0; j < layout.w_offset[k].size(); ++j) {
      const int off = layout.w_offset[k][j];
      const int cnt = layout.w_count[k][j];
      w[k][j].assign(x.begin() + off, x.begin() + off + cnt);
    }
  }
  return w;
}

}  // namespace utat::disagg
