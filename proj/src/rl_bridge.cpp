#include "eed2d/rl_bridge.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "eed2d/channel_model.hpp"
#include "eed2d/convex_solver.hpp"
#include "eed2d/errors.hpp"
#include "eed2d/rng.hpp"
#include "json.hpp"

namespace eed2d {

std::size_t state_length(int users) {
  const auto k = static_cast<std::size_t>(users);
  return 4 * k + 3 + k * (k - 1) / 2;
}

std::size_t action_length(int users, int antennas) {
  return 1 + 2 * static_cast<std::size_t>(users) * static_cast<std::size_t>(antennas);
}

NormalizedAction normalize_action(const std::vector<double>& raw, const SystemParams& params) {
  if (raw.size() != action_length(params.users, params.antennas))
    throw InvalidArgument("action has " + std::to_string(raw.size()) + " entries, expected " +
                          std::to_string(action_length(params.users, params.antennas)));
  for (double v : raw)
    if (!std::isfinite(v)) throw InvalidArgument("action entries must be finite");
  const RVector x = Eigen::Map<const RVector>(raw.data() + 1, static_cast<Eigen::Index>(raw.size() - 1));
  const double p_o = x.squaredNorm();
  if (!(p_o > 0.0)) throw AllZeroBeams("all beam entries are zero");
  BeamformingSet w = unlift(x * std::sqrt(params.p_max / p_o), params.users, params.antennas);
  const double tau = std::clamp(1.0 / (1.0 + std::exp(-raw.front())), 1e-3, 1.0 - 1e-3);
  return {std::move(w), TimeSwitch::from_tau(tau)};
}

double compute_reward(const BeamformingSet& w, const TimeSwitch& ts, const Scenario& scenario) {
  if (!scenario.qos_feasible(w, ts.tau_bar())) return 0.0;
  return scenario.rates(w, ts).ee;
}

double compute_reward(const BeamformingSet& w, const TimeSwitch& ts, const ChannelSet& channels,
                      const SystemParams& params) {
  return compute_reward(w, ts, Scenario(channels, params));
}

std::vector<double> env_state(const ChannelSet& ch, const RatesReport* rates,
                              const BeamformingSet* w) {
  const int k_users = ch.users();
  std::vector<double> s;
  s.reserve(state_length(k_users));
  for (const CVector& h : ch.h) s.push_back(h.squaredNorm());
  s.push_back(ch.h_dt.squaredNorm());
  s.push_back(ch.h_dr.squaredNorm());
  s.push_back(std::norm(ch.h_dd));
  for (cplx g : ch.h_dk) s.push_back(std::norm(g));
  for (int k = 0; k < k_users; ++k)
    s.push_back(rates ? rates->own.at(static_cast<std::size_t>(k)) : 0.0);
  for (int t = 0; t < k_users; ++t)
    for (int k = 0; k < t; ++k) s.push_back(rates ? rates->cross.at({t, k}) : 0.0);
  for (int k = 0; k < k_users; ++k) s.push_back(w ? w->w.col(k).squaredNorm() : 0.0);
  return s;
}

namespace {

using nlohmann::json;

struct Session {
  const BridgeOptions& opt;
  std::optional<Scenario> scenario;
  std::uint64_t episodes = 0;

  Scenario make(std::uint64_t seed) const {
    ChannelSet channels = draw_trial_channels(opt.params, seed);
    std::optional<CsiErrorRealization> error;
    if (opt.sigma_eps2) {
      Rng rng = make_rng(seed, Stream::csi_error);
      auto [estimated, realization] = apply_csi_error(channels, *opt.sigma_eps2, rng);
      channels = std::move(estimated);
      error = std::move(realization);
    }
    return Scenario(std::move(channels), opt.params, Access::noma, std::move(error));
  }

  json reset(const json& req) {
    std::uint64_t seed = opt.seed;
    if (opt.mode == EnvMode::redraw)
      seed = req.contains("seed") ? req.at("seed").get<std::uint64_t>()
                                  : trial_seed(opt.seed, episodes);
    ++episodes;
    scenario.emplace(make(seed));
    return {{"state", env_state(scenario->channels(), nullptr, nullptr)},
            {"k", opt.params.users},
            {"m", opt.params.antennas}};
  }

  json step(const json& req) {
    if (!scenario) throw InvalidArgument("step before reset");
    const auto raw = req.at("action").get<std::vector<double>>();
    NormalizedAction act;
    try {
      act = normalize_action(raw, opt.params);
    } catch (const AllZeroBeams&) {
      return {{"state", env_state(scenario->channels(), nullptr, nullptr)},
              {"reward", 0.0},
              {"feasible", false},
              {"ee", 0.0},
              {"rates", json::object()}};
    }
    const RatesReport rates = scenario->rates(act.w, act.tau);
    const bool feasible = scenario->qos_feasible(act.w, act.tau.tau_bar());
    json cross = json::array();
    for (const auto& [key, r] : rates.cross) cross.push_back({key.first, key.second, r});
    return {{"state", env_state(scenario->channels(), &rates, &act.w)},
            {"reward", feasible ? rates.ee : 0.0},
            {"feasible", feasible},
            {"ee", rates.ee},
            {"rates",
             {{"own", rates.own},
              {"cross", cross},
              {"d2d", rates.d2d_rate},
              {"harvested", rates.harvested},
              {"transmit", rates.transmit},
              {"energy", rates.energy},
              {"tau", act.tau.tau()}}}};
  }
};

void reply(std::ostream& out, const json& msg) {
  out << msg.dump() << '\n';
  out.flush();
}

}  // namespace

void serve(std::istream& in, std::ostream& out, const BridgeOptions& options) {
  options.params.validate();
  Session session{options, std::nullopt, 0};
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json req = json::parse(line);
      const std::string cmd = req.at("cmd").get<std::string>();
      if (cmd == "reset") {
        reply(out, session.reset(req));
      } else if (cmd == "step") {
        reply(out, session.step(req));
      } else if (cmd == "close") {
        reply(out, {{"closed", true}});
        return;
      } else {
        reply(out, {{"error", "unknown cmd '" + cmd + "'"}, {"fatal", false}});
      }
    } catch (const std::exception& e) {
      reply(out, {{"error", e.what()}, {"fatal", false}});
    }
  }
}

}  // namespace eed2d
