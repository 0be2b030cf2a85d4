// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure.  Each criterion is self-contained and states what it measured.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support/dataset.hpp"
#include "support/oracles.hpp"
#include "utat/disagg.hpp"
#include "utat/json_io.hpp"
#include "utat/lp.hpp"
#include "utat/postopt.hpp"
#include "utat/timeseries.hpp"

using namespace utat;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int n, bool ok, const std::string& detail) {
  std::printf("ACCEPTANCE %d: %s — %s\n", n, ok ? "PASS" : "FAIL", detail.c_str());
  if (!ok) ++g_failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

/// Collects failure notes; empty means the criterion holds.
struct Notes {
  std::vector<std::string> items;
  void require(bool ok, const std::string& what) {
    if (!ok) items.push_back(what);
  }
  std::string summary(const std::string& pass_detail) const {
    if (items.empty()) return pass_detail;
    std::string out = items.front();
    for (std::size_t i = 1; i < items.size() && i < 4; ++i) out += "; " + items[i];
    if (items.size() > 4) out += "; +" + std::to_string(items.size() - 4) + " more";
    return out;
  }
};

struct Panel {
  timeseries::TimeSeriesTensor tensor = testdata::make_tensor();
  timeseries::MeasureTensor measures = testdata::make_measures();
  disagg::RankingChain ranking = testdata::make_ranking();
};

const Panel& panel() {
  static const Panel p;
  return p;
}

int argmax3(const std::vector<double>& v) {
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

// ---------------------------------------------------------------------------
// 1. Zero-error fit of the reference panel reproduces the stated ranking.
void criterion1() {
  Notes notes;
  const auto t0 = Clock::now();
  const auto tensor = timeseries::load_tensor(std::filesystem::path(UTAT_DATA_DIR) / "panel.csv");
  const auto measures =
      timeseries::extract_measures(tensor, {"mean", "slope"}, timeseries::ScalePolicy::observed());
  const auto model = disagg::fit(measures, panel().ranking, disagg::DisaggConfig{});
  const double secs = seconds_since(t0);

  notes.require(model.z <= 1e-9, "z = " + fmt(model.z) + " exceeds 1e-9");

  const auto groups = disagg::rank_alternatives(model, measures);
  std::vector<std::string> flat;
  for (const auto& g : groups) {
    for (const auto& id : g.ids) flat.push_back(id);
  }
  notes.require(flat == panel().ranking.order, "model ranking differs from the stated ranking");
  const auto tau = disagg::kendall_tau(flat, panel().ranking.order);
  notes.require(std::fabs(tau.tau - 1.0) <= 1e-12, "kendall tau = " + fmt(tau.tau));
  notes.require(secs < 1.0, "fit took " + fmt(secs) + " s (budget 1 s)");

  report(1, notes.items.empty(),
         notes.summary("z = " + fmt(model.z) + ", ranking reproduced, tau = 1, " +
                       fmt(secs * 1000) + " ms"));
}

// ---------------------------------------------------------------------------
// 2. The hand-checked weight assignment is feasible and reproduces the
//    recorded global values.
void criterion2() {
  Notes notes;
  const auto& p = panel();
  const auto program = disagg::build_program(p.measures, p.ranking, disagg::DisaggConfig{});
  const auto layout = disagg::layout_for(p.measures, p.ranking, disagg::DisaggConfig{});

  std::map<std::string, double> assignment;
  for (const auto& sw : testdata::consistent_assignment()) {
    assignment["w[" + std::to_string(sw.k) + "][" + std::to_string(sw.j) + "][" +
               std::to_string(sw.l) + "]"] = sw.value;
  }
  const auto feas = lp::check_feasible(program, assignment);
  notes.require(feas.feasible,
                "assignment violates the polyhedron (worst " + feas.worst + " residual " +
                    fmt(feas.max_residual) + ")");

  disagg::ValueModel model;
  model.measures = p.measures.measures;
  model.criteria = p.measures.criteria;
  model.alternatives = p.measures.alternatives;
  model.scales = p.measures.scales;
  model.w = disagg::unflatten_w(
      layout, testdata::flat_w_from_sparse(layout, testdata::consistent_assignment()));

  double worst = 0.0;
  for (const auto& [id, expected] : testdata::expected_globals()) {
    const double got = disagg::global_value(model, p.measures, id);
    worst = std::max(worst, std::fabs(got - expected));
  }
  notes.require(worst <= 1e-9, "worst global-value error " + fmt(worst));

  report(2, notes.items.empty(),
         notes.summary("assignment feasible (residual " + fmt(feas.max_residual) +
                       "), all 10 global values within " + fmt(worst)));
}

// ---------------------------------------------------------------------------
// 3. Ordered simulations: c1 > c3 > c2 collapses to one objective class whose
//    per-iteration objective matches the known vertex; c1 > c2 > c3 splits
//    into exactly two classes with the recorded frequencies.
void criterion3() {
  Notes notes;
  const auto t0 = Clock::now();
  const auto& p = panel();
  disagg::DisaggConfig cfg;
  cfg.epsilon = 0.0;  // exact alternative-optima sweep
  const auto model = disagg::fit(p.measures, p.ranking, cfg);
  const auto layout = disagg::layout_for(p.measures, p.ranking, cfg);

  // Per-iteration objective check against the known collapse vertex.
  const auto order_idx = postopt::order_indices(postopt::CriteriaOrder{{"c1", "c3", "c2"}},
                                                p.measures);
  double worst_obj = 0.0;
  for (long long i = 0; i < 1000; ++i) {
    postopt::Rng rng(42, static_cast<std::uint64_t>(i));
    const auto mu = postopt::sample_mu_nested(rng, order_idx);
    const auto res = postopt::mo_solve(p.measures, p.ranking, cfg, model, mu);
    double expected = 0.0;
    for (int j = 0; j < 3; ++j) expected += mu[j] * testdata::kOrderedC1c3c2Totals[j];
    worst_obj = std::max(worst_obj, std::fabs(res.objective - expected));
  }
  notes.require(worst_obj <= 1e-6,
                "objective deviates from the collapse vertex by " + fmt(worst_obj));

  postopt::SimOptions opts;
  opts.iterations = 1000;
  opts.seed = 42;
  opts.scheme = postopt::OrderedScheme::nested;
  opts.threads = 4;

  opts.order = postopt::CriteriaOrder{{"c1", "c3", "c2"}};
  const auto ens132 = postopt::mo_simulate(p.measures, p.ranking, cfg, model, opts);
  const auto classes132 = postopt::objective_classes(ens132, layout);
  notes.require(classes132.size() == 1,
                "c1>c3>c2 produced " + std::to_string(classes132.size()) + " classes");
  if (classes132.size() == 1) {
    for (int j = 0; j < 3; ++j) {
      notes.require(std::fabs(classes132[0].totals[j] - testdata::kOrderedC1c3c2Totals[j]) <= 1e-6,
                    "c1>c3>c2 totals mismatch at criterion " + std::to_string(j + 1));
    }
  }

  opts.order = postopt::CriteriaOrder{{"c1", "c2", "c3"}};
  const auto ens123 = postopt::mo_simulate(p.measures, p.ranking, cfg, model, opts);
  const auto classes123 = postopt::objective_classes(ens123, layout);
  notes.require(classes123.size() == 2,
                "c1>c2>c3 produced " + std::to_string(classes123.size()) + " classes");
  long long large = -1, small = -1;
  for (const auto& cls : classes123) {
    bool is_large = true, is_small = true;
    for (int j = 0; j < 3; ++j) {
      if (std::fabs(cls.totals[j] - testdata::kLargeClassTotals[j]) > 1e-6) is_large = false;
      if (std::fabs(cls.totals[j] - testdata::kSmallClassTotals[j]) > 1e-6) is_small = false;
    }
    if (is_large) large = cls.count;
    if (is_small) small = cls.count;
  }
  notes.require(large >= 0 && small >= 0, "c1>c2>c3 classes are not the two recorded ones");
  notes.require(large >= 602 && large <= 722,
                "larger class count " + std::to_string(large) + " outside 662 +/- 60");
  notes.require(small >= 278 && small <= 398,
                "smaller class count " + std::to_string(small) + " outside 338 +/- 60");

  const double secs = seconds_since(t0);
  notes.require(secs < 30.0, "ordered runs took " + fmt(secs) + " s (budget 30 s)");

  report(3, notes.items.empty(),
         notes.summary("single class for c1>c3>c2 (worst objective gap " + fmt(worst_obj) +
                       "), two classes " + std::to_string(large) + "/" + std::to_string(small) +
                       " for c1>c2>c3, " + fmt(secs) + " s"));
}

// ---------------------------------------------------------------------------
// 4. Unordered simulation: counts, feasibility, dominance thirds, weighted
//    average; the recorded 8-solution fixture reproduces the printed average.
void criterion4() {
  Notes notes;
  const auto& p = panel();
  disagg::DisaggConfig cfg;
  cfg.epsilon = 0.0;
  const auto model = disagg::fit(p.measures, p.ranking, cfg);
  const auto layout = disagg::layout_for(p.measures, p.ranking, cfg);

  postopt::SimOptions opts;
  opts.iterations = 1000;
  opts.seed = 42;
  opts.threads = 4;
  const auto ens = postopt::mo_simulate(p.measures, p.ranking, cfg, model, opts);

  long long total = 0;
  for (const auto& e : ens.entries) total += e.count;
  notes.require(total == 1000, "counts sum to " + std::to_string(total));

  const auto program = postopt::mo_program(p.measures, p.ranking, cfg, model);
  double worst_residual = 0.0;
  double worst_norm = 0.0;
  for (const auto& entry : ens.entries) {
    const auto feas = lp::check_feasible(program, entry.solution);
    worst_residual = std::max(worst_residual, feas.max_residual);
    for (int k = 0; k < p.measures.h(); ++k) {
      double sum = 0.0;
      for (int j = 0; j < p.measures.n(); ++j) {
        for (int l = 0; l < layout.w_count[k][j]; ++l) sum += entry.w[layout.w_index(k, j, l)];
      }
      worst_norm = std::max(worst_norm, std::fabs(sum - 1.0));
    }
  }
  notes.require(worst_residual <= 1e-8, "worst entry residual " + fmt(worst_residual));
  notes.require(worst_norm <= 1e-9, "worst normalization error " + fmt(worst_norm));

  // Dominance thirds: the criterion holding the largest mu also receives the
  // largest cumulative weight in that iteration's solution.
  long long thirds[3] = {0, 0, 0};
  long long concentrated = 0;
  for (long long i = 0; i < 1000; ++i) {
    postopt::Rng rng(42, static_cast<std::uint64_t>(i));
    const auto mu = postopt::sample_mu(rng, 3);
    const int jmax = argmax3(mu);
    ++thirds[jmax];
    const auto res = postopt::mo_solve(p.measures, p.ranking, cfg, model, mu);
    if (argmax3(postopt::criterion_totals(layout, res.w)) == jmax) ++concentrated;
  }
  for (int j = 0; j < 3; ++j) {
    notes.require(thirds[j] >= 273 && thirds[j] <= 393,
                  "third " + std::to_string(j + 1) + " count " + std::to_string(thirds[j]) +
                      " outside 333 +/- 60");
  }
  notes.require(concentrated >= 950,
                "solutions concentrated on the top-mu criterion in only " +
                    std::to_string(concentrated) + "/1000 iterations");

  // Weighted average: recompute independently from the stored entries.
  std::vector<double> recomputed(layout.n_w, 0.0);
  for (const auto& entry : ens.entries) {
    for (int v = 0; v < layout.n_w; ++v) {
      recomputed[v] += static_cast<double>(entry.count) * entry.w[v];
    }
  }
  double worst_wa = 0.0;
  for (int v = 0; v < layout.n_w; ++v) {
    recomputed[v] /= 1000.0;
    worst_wa = std::max(worst_wa, std::fabs(recomputed[v] - ens.weighted_average[v]));
  }
  notes.require(worst_wa <= 1e-9, "stored weighted average off by " + fmt(worst_wa));

  // Feeding the recorded 8-solution fixture reproduces its printed averages.
  postopt::SolutionEnsemble fixture;
  fixture.iterations = 1000;
  for (int s = 0; s < 8; ++s) {
    postopt::EnsembleEntry entry;
    entry.w.assign(static_cast<std::size_t>(layout.n_w), 0.0);
    for (const auto& row : testdata::printed_ensemble_rows()) {
      if (row.values[s] != 0.0) {
        entry.w[layout.w_index(row.k - 1, row.j - 1, row.l - 1)] = row.values[s];
      }
    }
    entry.count = testdata::kPrintedCounts[s];
    entry.first_iteration = s;
    fixture.entries.push_back(std::move(entry));
  }
  const auto wa = postopt::weighted_average(fixture);
  const double wa111 = wa[layout.w_index(0, 0, 0)];
  notes.require(std::fabs(wa111 - 0.23755) <= 1e-9,
                "fixture average for the first weight is " + fmt(wa111));
  char printed[16];
  std::snprintf(printed, sizeof printed, "%.2f", wa111);
  notes.require(std::string(printed) == "0.24",
                std::string("fixture average prints as ") + printed);
  double worst_fixture = 0.0;
  for (const auto& row : testdata::printed_ensemble_rows()) {
    const double got = wa[layout.w_index(row.k - 1, row.j - 1, row.l - 1)];
    worst_fixture = std::max(worst_fixture, std::fabs(got - row.printed_wa));
  }
  notes.require(worst_fixture <= 0.005 + 1e-9,
                "fixture averages deviate from the printed column by " + fmt(worst_fixture));

  report(4, notes.items.empty(),
         notes.summary(std::to_string(ens.entries.size()) +
                       " entries summing to 1000, worst residual " + fmt(worst_residual) +
                       ", thirds " + std::to_string(thirds[0]) + "/" + std::to_string(thirds[1]) +
                       "/" + std::to_string(thirds[2]) + ", concentration " +
                       std::to_string(concentrated) + "/1000, fixture average 0.24"));
}

// ---------------------------------------------------------------------------
// 5. Mean and slope agree with independent closed-form formulas on all 30
//    series, including the spot anchors.
void criterion5() {
  Notes notes;
  const auto& tensor = panel().tensor;
  double worst = 0.0;
  for (int i = 0; i < tensor.m(); ++i) {
    for (int j = 0; j < tensor.n(); ++j) {
      const auto series = tensor.series(i, j);
      const std::vector<double> v(series.begin(), series.end());
      worst = std::max(worst,
                       std::fabs(timeseries::mean_measure(series) - oracles::mean_oracle(v)));
      worst = std::max(worst,
                       std::fabs(timeseries::slope_measure(series) - oracles::slope_oracle(v)));
    }
  }
  notes.require(worst <= 1e-6, "worst measure disagreement " + fmt(worst));

  const int br = tensor.alternative_index("BR");
  const int za = tensor.alternative_index("ZA");
  const int c1 = tensor.criterion_index("c1");
  const double br_mean = timeseries::mean_measure(tensor.series(br, c1));
  const double br_slope = timeseries::slope_measure(tensor.series(br, c1));
  const double za_slope = timeseries::slope_measure(tensor.series(za, c1));
  notes.require(std::fabs(br_mean - 70.5) <= 1e-9, "BR c1 mean = " + fmt(br_mean));
  notes.require(std::fabs(br_slope - 1.8971) <= 5e-4, "BR c1 slope = " + fmt(br_slope));
  notes.require(std::fabs(za_slope - (-1.3143)) <= 5e-4, "ZA c1 slope = " + fmt(za_slope));

  report(5, notes.items.empty(),
         notes.summary("all 30 series agree with the closed-form oracle (worst " + fmt(worst) +
                       "), anchors 70.5 / 1.8971 / -1.3143 hit"));
}

// ---------------------------------------------------------------------------
// 6. Simplex agrees with brute-force vertex enumeration and classifies
//    infeasible/unbounded constructions.
void criterion6() {
  Notes notes;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240817);

  double worst = 0.0;
  int solved = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto program = oracles::random_bounded_feasible_lp(rng);
    const auto sol = lp::solve(program);
    const auto oracle = oracles::enumerate_optimum(program);
    if (sol.status != lp::SolveStatus::optimal || !oracle.feasible) {
      notes.require(false, "trial " + std::to_string(trial) + " not solved as optimal");
      continue;
    }
    ++solved;
    worst = std::max(worst, std::fabs(sol.objective - oracle.objective));
  }
  notes.require(worst <= 1e-8, "worst objective gap vs enumeration " + fmt(worst));

  int misclassified = 0;
  for (int trial = 0; trial < 30; ++trial) {
    if (lp::solve(oracles::random_infeasible_lp(rng)).status != lp::SolveStatus::infeasible) {
      ++misclassified;
    }
    if (lp::solve(oracles::random_unbounded_lp(rng)).status != lp::SolveStatus::unbounded) {
      ++misclassified;
    }
  }
  notes.require(misclassified == 0,
                std::to_string(misclassified) + " infeasible/unbounded cases misclassified");

  const double secs = seconds_since(t0);
  notes.require(secs < 10.0, "solver oracle took " + fmt(secs) + " s (budget 10 s)");

  report(6, notes.items.empty(),
         notes.summary(std::to_string(solved) + "/200 optima match enumeration (worst gap " +
                       fmt(worst) + "), 60/60 degenerate cases classified, " + fmt(secs) + " s"));
}

// ---------------------------------------------------------------------------
// 7. Structural properties and determinism on the reference panel plus 50
//    random instances.
void criterion7() {
  Notes notes;
  std::mt19937_64 rng(123456);

  struct Instance {
    timeseries::MeasureTensor measures;
    disagg::RankingChain ranking;
    disagg::DisaggConfig config;
    std::string tag;
  };
  std::vector<Instance> instances;
  instances.push_back({panel().measures, panel().ranking, disagg::DisaggConfig{}, "panel"});
  for (int t = 0; t < 50; ++t) {
    auto inst = oracles::random_instance(rng);
    instances.push_back(
        {std::move(inst.measures), std::move(inst.ranking), inst.config,
         "random " + std::to_string(t)});
  }

  for (const auto& inst : instances) {
    const auto model = disagg::fit(inst.measures, inst.ranking, inst.config);

    for (int k = 0; k < inst.measures.h(); ++k) {
      double sum = 0.0;
      for (const auto& steps : model.w[k]) {
        for (double v : steps) {
          sum += v;
          notes.require(v >= -1e-12, inst.tag + ": negative weight " + fmt(v));
        }
      }
      notes.require(std::fabs(sum - 1.0) <= 1e-9,
                    inst.tag + ": normalization off by " + fmt(sum - 1.0));
    }

    // Marginal value functions never decrease along their grids.
    for (int k = 0; k < inst.measures.h(); ++k) {
      for (int j = 0; j < inst.measures.n(); ++j) {
        const auto& grid = inst.measures.scales[k][j];
        double prev = 0.0;
        for (int b = 0; b < grid.alpha(); ++b) {
          const double u = disagg::marginal_value(model, k, j, grid.breakpoints[b]);
          notes.require(u >= prev - 1e-12, inst.tag + ": marginal value decreases");
          prev = u;
        }
      }
    }

    // Refitting is byte-identical.
    const auto refit = disagg::fit(inst.measures, inst.ranking, inst.config);
    notes.require(jsonio::model_to_json(model) == jsonio::model_to_json(refit),
                  inst.tag + ": refit changed the serialized model");

    // Simulation is reproducible and thread-count invariant, byte for byte.
    postopt::SimOptions opts;
    opts.iterations = (inst.tag == "panel") ? 100 : 30;
    opts.seed = 42;
    opts.threads = 1;
    const auto serial = postopt::mo_simulate(inst.measures, inst.ranking, inst.config, model, opts);
    const auto serial2 =
        postopt::mo_simulate(inst.measures, inst.ranking, inst.config, model, opts);
    opts.threads = 3;
    const auto parallel =
        postopt::mo_simulate(inst.measures, inst.ranking, inst.config, model, opts);
    const std::string a = jsonio::ensemble_to_json(serial, model);
    notes.require(a == jsonio::ensemble_to_json(serial2, model),
                  inst.tag + ": repeated simulation differs");
    notes.require(a == jsonio::ensemble_to_json(parallel, model),
                  inst.tag + ": parallel simulation differs from serial");
  }

  report(7, notes.items.empty(),
         notes.summary("normalization, non-negativity, monotonicity, refit determinism and "
                       "serial/parallel byte-equality hold on the panel and 50 random instances"));
}

// ---------------------------------------------------------------------------
// 8. With a single static measure the temporal variant degenerates to the
//    classical one; the 2-alternative contradiction costs exactly 1.05.
void criterion8() {
  Notes notes;
  std::mt19937_64 rng(5150);

  for (int t = 0; t < 20; ++t) {
    const auto inst = oracles::random_instance(rng);
    const auto static_measures = timeseries::extract_measures(
        inst.tensor, {"last"}, timeseries::ScalePolicy::observed());

    disagg::DisaggConfig classical = inst.config;
    classical.variant = disagg::Variant::utastar;
    disagg::DisaggConfig temporal = inst.config;
    temporal.variant = disagg::Variant::utastar_t;

    const auto prog_classical = disagg::build_program(static_measures, inst.ranking, classical);
    const auto prog_temporal = disagg::build_program(static_measures, inst.ranking, temporal);
    notes.require(lp::dump(prog_classical, true) == lp::dump(prog_temporal, true),
                  "instance " + std::to_string(t) + ": programs differ structurally");

    const auto fit_classical = disagg::fit(static_measures, inst.ranking, classical);
    const auto fit_temporal = disagg::fit(static_measures, inst.ranking, temporal);
    notes.require(fit_classical.z == fit_temporal.z,
                  "instance " + std::to_string(t) + ": z " + fmt(fit_classical.z) + " vs " +
                      fmt(fit_temporal.z));
  }

  // Hand-solvable contradiction: the dominated alternative is ranked first,
  // so the cheapest repair is the full unit of value plus delta.
  timeseries::TimeSeriesTensor tiny;
  tiny.alternatives = {"X", "Y"};
  tiny.criteria = {{"c1", timeseries::Direction::maximize}};
  tiny.samples = 2;
  tiny.values = {0.0, 0.0, 10.0, 10.0};
  const auto tiny_measures =
      timeseries::extract_measures(tiny, {"last"}, timeseries::ScalePolicy::observed());
  const auto tiny_ranking = disagg::RankingChain::parse("X > Y");
  double worst = 0.0;
  for (auto variant :
       {disagg::Variant::uta, disagg::Variant::utastar, disagg::Variant::utastar_t}) {
    disagg::DisaggConfig cfg;
    cfg.variant = variant;
    const auto model = disagg::fit(tiny_measures, tiny_ranking, cfg);
    worst = std::max(worst, std::fabs(model.z - 1.05));
  }
  notes.require(worst <= 1e-9, "contradiction cost off by " + fmt(worst));

  report(8, notes.items.empty(),
         notes.summary("20/20 static-measure programs identical modulo names with equal z, "
                       "contradiction instance costs 1.05 (err " + fmt(worst) + ")"));
}

}  // namespace

int main() {
  struct Criterion {
    int n;
    void (*run)();
  };
  const Criterion criteria[] = {{1, criterion1}, {2, criterion2}, {3, criterion3},
                                {4, criterion4}, {5, criterion5}, {6, criterion6},
                                {7, criterion7}, {8, criterion8}};
  for (const auto& c : criteria) {
    try {
      c.run();
    } catch (const std::exception& e) {
      report(c.n, false, std::string("unhandled exception: ") + e.what());
    } catch (...) {
      report(c.n, false, "unhandled non-standard exception");
    }
  }
  if (g_failures > 0) {
    std::printf("%d of 8 acceptance criteria failed\n", g_failures);
    return 1;
  }
  std::printf("all 8 acceptance criteria hold\n");
  return 0;
}
