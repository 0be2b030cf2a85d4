#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "utat/cli.hpp"
#include "utat/errors.hpp"
#include "utat/json_io.hpp"

namespace {

struct RawOpts {
  std::string tensor, ranking, output, config_file, model;
  std::string measures, scale_policy, directions, variant;
  std::string criteria_order, order_scheme;
  double delta = 0, epsilon = 0, gamma = 0;
  long long iterations = 0;
  std::uint64_t seed = 0;
  int threads = 0;
  bool plots = false, plots_raw = false;
};

void add_shared_options(CLI::App* sub, RawOpts& raw) {
  sub->add_option("--tensor", raw.tensor, "Time-series CSV (alternative,criterion,t,value)");
  sub->add_option("--ranking", raw.ranking, "Reference ranking file (one 'A > B ~ C' line)");
  sub->add_option("--output,-o", raw.output, "Output directory (default: current directory)");
  sub->add_option("--config", raw.config_file, "JSON config file; explicit flags override it");
  sub->add_option("--measures", raw.measures, "Comma-separated measures (default: mean,slope)");
  sub->add_option("--scale-policy", raw.scale_policy, "observed | equal:<alpha>");
  sub->add_option("--delta", raw.delta, "Strict-preference threshold (default 0.05)");
  sub->add_option("--epsilon", raw.epsilon, "Near-optimality slack for simulation (default 1e-6)");
  sub->add_option("--gamma", raw.gamma, "Relative slack for classical bounds (default 0.01)");
  sub->add_option("--directions", raw.directions, "e.g. c1=max,c2=min (default: all max)");
  sub->add_option("--variant", raw.variant, "uta | utastar | utastar-t (default utastar-t)");
}

/// Merges the config file (if any) and the explicitly passed flags into a
/// RunConfig; flags always win over file values.
utat::cli::RunConfig build_config(CLI::App* sub, const RawOpts& raw) {
  // Not every option exists on every subcommand, so probe before counting.
  const auto passed = [sub](const std::string& name) {
    const CLI::Option* opt = sub->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };

  utat::cli::RunConfig rc;
  if (passed("--config")) utat::cli::apply_config_file(rc, raw.config_file);
  if (passed("--tensor")) rc.tensor_path = raw.tensor;
  if (passed("--ranking")) rc.ranking_path = raw.ranking;
  if (passed("--output")) rc.output_dir = raw.output;
  if (passed("--measures")) rc.measures = utat::cli::parse_measures(raw.measures);
  if (passed("--scale-policy")) {
    rc.scale_policy = utat::cli::parse_scale_policy(raw.scale_policy);
  }
  if (passed("--directions")) rc.directions = utat::cli::parse_directions(raw.directions);
  if (passed("--delta")) rc.disagg.delta = raw.delta;
  if (passed("--epsilon")) rc.disagg.epsilon = raw.epsilon;
  if (passed("--gamma")) rc.disagg.gamma = raw.gamma;
  if (passed("--variant")) {
    rc.disagg.variant = utat::disagg::variant_from_name(raw.variant);
  }
  if (passed("--model")) rc.model_path = raw.model;
  if (passed("--iterations")) rc.iterations = raw.iterations;
  if (passed("--seed")) rc.seed = raw.seed;
  if (passed("--criteria-order")) {
    rc.criteria_order = utat::cli::parse_criteria_order(raw.criteria_order);
  }
  if (passed("--order-scheme")) {
    rc.order_scheme = utat::postopt::scheme_from_name(raw.order_scheme);
  }
  if (passed("--threads")) rc.threads = raw.threads;
  if (passed("--plots")) rc.plots = raw.plots;
  if (passed("--plots-raw")) rc.plots_raw = raw.plots_raw;

  if (rc.tensor_path.empty()) throw utat::Error("validation-error", "--tensor is required");
  if (rc.ranking_path.empty()) throw utat::Error("validation-error", "--ranking is required");
  if (rc.threads < 1) throw utat::Error("validation-error", "--threads must be >= 1");
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Preference disaggregation over evolving criteria: fits an additive "
               "piecewise-linear value model to a reference ranking and explores the "
               "space of compatible models"};
  app.require_subcommand(1);
  RawOpts raw;

  CLI::App* fit = app.add_subcommand("fit", "Fit the value model and write model/report files");
  add_shared_options(fit, raw);
  fit->add_flag("--plots", raw.plots, "Write one normalized marginal-value SVG per pair");
  fit->add_flag("--plots-raw", raw.plots_raw, "Also write unnormalized SVG variants");

  CLI::App* post = app.add_subcommand("postopt", "Classical min/max/average weight bounds");
  add_shared_options(post, raw);
  post->add_option("--model", raw.model, "Reuse a fitted model file instead of refitting");

  CLI::App* sim = app.add_subcommand("simulate", "Monte Carlo sweep over compatible models");
  add_shared_options(sim, raw);
  sim->add_option("--model", raw.model, "Reuse a fitted model file instead of refitting");
  sim->add_option("--iterations", raw.iterations, "Monte Carlo iterations (default 1000)");
  sim->add_option("--seed", raw.seed, "RNG seed (default 42)");
  sim->add_option("--criteria-order", raw.criteria_order,
                  "Relevance order, e.g. c1>c3>c2 (default: unordered draws)");
  sim->add_option("--order-scheme", raw.order_scheme, "nested | sorted (default nested)");
  sim->add_option("--threads", raw.threads, "Worker threads (default 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  utat::cli::RunConfig rc;
  try {
    rc = build_config(sub, raw);
  } catch (const utat::Error& e) {
    std::cerr << utat::jsonio::error_to_json(e);
    return e.exit_code;
  }

  if (sub == fit) return utat::cli::cmd_fit(rc);
  if (sub == post) return utat::cli::cmd_postopt(rc);
  return utat::cli::cmd_simulate(rc);
}
