#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "eed2d/algorithms.hpp"
#include "eed2d/channel_model.hpp"
#include "eed2d/convex_solver.hpp"
#include "eed2d/errors.hpp"
#include "eed2d/experiments.hpp"
#include "eed2d/rl_bridge.hpp"
#include "json.hpp"

using namespace eed2d;
using nlohmann::json;

namespace {

constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> csi;
  std::optional<double> sigma_eps;
  std::optional<double> xi;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "flat key = value config file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "master seed");
  cmd->add_option("--csi", c.csi, "perfect | imperfect")
      ->check(CLI::IsMember({"perfect", "imperfect"}));
  cmd->add_option("--sigma-eps", c.sigma_eps, "CSI error variance per entry");
  cmd->add_option("--xi", c.xi, "exhaustive-search tau step");
}

ExperimentConfig resolve(const Common& c) {
  ExperimentConfig cfg = c.config.empty() ? ExperimentConfig{} : load_config(c.config);
  if (c.seed) cfg.master_seed = *c.seed;
  if (c.csi) cfg.csi = parse_csi_mode(*c.csi);
  if (c.sigma_eps) {
    cfg.sigma_eps2 = *c.sigma_eps;
    if (!c.csi) cfg.csi = CsiMode::imperfect;
  }
  if (c.xi) cfg.xi = *c.xi;
  cfg.validate();
  return cfg;
}

json rates_json(const RatesReport& r) {
  json cross = json::array();
  for (const auto& [key, v] : r.cross) cross.push_back({key.first, key.second, v});
  return {{"own", r.own},           {"cross", cross},         {"d2d", r.d2d_rate},
          {"harvested", r.harvested}, {"transmit", r.transmit}, {"energy", r.energy},
          {"ee", r.ee}};
}

Scenario trial_scenario(const ExperimentConfig& cfg, const SystemParams& params, int trial,
                        Access scheme) {
  const std::uint64_t seed = trial_seed(cfg.master_seed, static_cast<std::uint64_t>(trial));
  ChannelSet channels = draw_trial_channels(params, seed);
  std::optional<CsiErrorRealization> error;
  if (cfg.csi == CsiMode::imperfect) {
    Rng rng = make_rng(seed, Stream::csi_error);
    auto [estimated, realization] = apply_csi_error(channels, cfg.sigma_eps2, rng);
    channels = std::move(estimated);
    error = std::move(realization);
  }
  return Scenario(std::move(channels), params, scheme, std::move(error));
}

int run_solve(const Common& c, const std::string& scheme, const std::string& algorithm,
              int trial) {
  const ExperimentConfig cfg = resolve(c);
  const SystemParams params = cfg.params_at(cfg.values.front());
  const Scenario scenario = trial_scenario(cfg, params, trial, parse_access(scheme));
  Solution sol;
  try {
    if (parse_algorithm(algorithm) == Algorithm::alt) {
      sol = alternating_optimize(scenario);
    } else {
      ExhaustiveOptions opts;
      opts.xi = cfg.xi;
      sol = exhaustive_tau_optimize(scenario, opts);
    }
  } catch (const Infeasible& e) {
    std::cout << json{{"feasible", false}, {"reason", e.what()}}.dump() << '\n';
    return kExitInfeasible;
  }
  std::cout << json{{"feasible", true},
                    {"scheme", to_string(sol.scheme)},
                    {"algorithm", to_string(sol.algorithm)},
                    {"ee", sol.ee},
                    {"tau", sol.tau.tau()},
                    {"iterations", sol.iterations},
                    {"converged", sol.converged},
                    {"total_power", sol.w.total_power()},
                    {"trace", sol.trace},
                    {"rates", rates_json(sol.rates)}}
                   .dump()
            << '\n';
  return 0;
}

int run_oracle(const Common& c) {
  const ExperimentConfig cfg = resolve(c);
  const SystemParams params = cfg.params_at(cfg.values.front());
  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.empty()) continue;
    try {
      const json req = json::parse(line);
      const Scenario scenario = trial_scenario(cfg, params, req.value("trial", 0), Access::noma);
      const auto x = req.at("w").get<std::vector<double>>();
      const BeamformingSet w =
          unlift(Eigen::Map<const RVector>(x.data(), static_cast<Eigen::Index>(x.size())),
                 params.users, params.antennas);
      const TimeSwitch ts = TimeSwitch::from_tau(req.at("tau").get<double>());
      std::cout << json{{"rates", rates_json(scenario.rates(w, ts))},
                        {"margins", scenario.margins(w, ts.tau_bar())},
                        {"qos_feasible", scenario.qos_feasible(w, ts.tau_bar())}}
                       .dump()
                << std::endl;
    } catch (const std::exception& e) {
      std::cout << json{{"error", e.what()}, {"fatal", false}}.dump() << std::endl;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-efficiency optimization of a wireless-powered D2D pair in a NOMA downlink"};
  app.require_subcommand(1);

  Common solve_c;
  std::string solve_scheme = "noma";
  std::string solve_alg = "alt";
  int solve_trial = 0;
  auto* solve = app.add_subcommand("solve", "optimize one seeded instance and print JSON");
  add_common(solve, solve_c);
  solve->add_option("--scheme", solve_scheme, "noma | oma")->check(CLI::IsMember({"noma", "oma"}));
  solve->add_option("--algorithm", solve_alg, "alt | exhaustive")
      ->check(CLI::IsMember({"alt", "exhaustive"}));
  solve->add_option("--trial", solve_trial, "trial index under the master seed");

  Common sweep_c;
  std::optional<int> sweep_trials;
  std::string sweep_out;
  std::string sweep_plot;
  std::optional<std::string> sweep_scheme;
  std::optional<std::string> sweep_alg;
  auto* sweep = app.add_subcommand("sweep", "Monte Carlo sweep to CSV");
  add_common(sweep, sweep_c);
  sweep->add_option("--trials", sweep_trials, "trial count")->check(CLI::PositiveNumber);
  sweep->add_option("--out", sweep_out, "CSV output path (stdout when absent)");
  sweep->add_option("--plot", sweep_plot, "gnuplot script output path");
  sweep->add_option("--scheme", sweep_scheme, "noma | oma")->check(CLI::IsMember({"noma", "oma"}));
  sweep->add_option("--algorithm", sweep_alg, "alt | exhaustive")
      ->check(CLI::IsMember({"alt", "exhaustive"}));

  Common serve_c;
  std::string serve_mode = "fixed";
  auto* serve_cmd = app.add_subcommand("serve-env", "JSON-lines RL environment on stdin/stdout");
  add_common(serve_cmd, serve_c);
  serve_cmd->add_option("--mode", serve_mode, "fixed | redraw")
      ->check(CLI::IsMember({"fixed", "redraw"}));

  Common oracle_c;
  auto* oracle = app.add_subcommand(
      "oracle", "evaluate {\"trial\", \"tau\", \"w\"} JSON lines (w = [Re..., Im...]) from stdin");
  add_common(oracle, oracle_c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitError;
  }

  try {
    if (*solve) return run_solve(solve_c, solve_scheme, solve_alg, solve_trial);

    if (*sweep) {
      ExperimentConfig cfg = resolve(sweep_c);
      if (sweep_trials) cfg.trials = *sweep_trials;
      if (sweep_scheme) cfg.schemes = {parse_access(*sweep_scheme)};
      if (sweep_alg) cfg.algorithms = {parse_algorithm(*sweep_alg)};
      if (!sweep_out.empty()) cfg.output = sweep_out;
      const ResultsTable table = run_sweep(cfg);
      if (cfg.output.empty())
        write_csv(table, std::cout);
      else
        write_csv(table, cfg.output);
      if (!sweep_plot.empty()) emit_plot_script(table, sweep_plot);
      bool any = false;
      for (const ResultRow& r : table.rows) any = any || r.feasible;
      for (const SummaryRow& s : summarize(table))
        std::fprintf(stderr, "%s=%g %s/%s mean_ee=%.6g std=%.3g feasible=%d/%d\n",
                     to_string(cfg.sweep), s.sweep_value, to_string(s.scheme),
                     to_string(s.algorithm), s.mean, s.stddev, s.feasible, s.total);
      return any ? 0 : kExitInfeasible;
    }

    if (*serve_cmd) {
      const ExperimentConfig cfg = resolve(serve_c);
      BridgeOptions opts;
      opts.params = cfg.params_at(cfg.values.front());
      opts.mode = serve_mode == "fixed" ? EnvMode::fixed : EnvMode::redraw;
      opts.seed = cfg.master_seed;
      if (cfg.csi == CsiMode::imperfect) opts.sigma_eps2 = cfg.sigma_eps2;
      serve(std::cin, std::cout, opts);
      return 0;
    }

    if (*oracle) return run_oracle(oracle_c);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
  return kExitError;
}
