#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "eed2d/algorithms.hpp"
#include "eed2d/errors.hpp"
#include "eed2d/experiments.hpp"
#include "eed2d/rl_bridge.hpp"
#include "json.hpp"
#include "support.hpp"

using namespace eed2d;
using nlohmann::json;
using testing_support::rel_err;

namespace {

std::vector<json> session(const std::string& input, const BridgeOptions& opt) {
  std::istringstream in(input);
  std::ostringstream out;
  serve(in, out, opt);
  std::vector<json> replies;
  std::istringstream lines(out.str());
  std::string line;
  while (std::getline(lines, line)) replies.push_back(json::parse(line));
  return replies;
}

std::vector<double> action_from(const BeamformingSet& w, double tau_raw) {
  const RVector x = lift(w);
  std::vector<double> a{tau_raw};
  a.insert(a.end(), x.data(), x.data() + x.size());
  return a;
}

}  // namespace

TEST_CASE("state and action lengths") {
  CHECK(state_length(4) == 25);
  CHECK(state_length(1) == 7);
  CHECK(action_length(4, 10) == 81);
  SystemParams p;
  const ChannelSet c = draw_trial_channels(p, 1);
  CHECK(env_state(c, nullptr, nullptr).size() == 25);
}

TEST_CASE("action normalization examples") {
  SystemParams p;
  p.users = 2;
  p.antennas = 1;
  p.p_max = 0.1;
  // P_o = 0.4 -> scale sqrt(0.1 / 0.4) = 0.5
  const std::vector<double> raw{0.0, 0.4, 0.2, 0.4, 0.2};
  const NormalizedAction a = normalize_action(raw, p);
  CHECK(std::abs(a.w.w(0, 0) - cplx(0.2, 0.2)) < 1e-15);
  CHECK(std::abs(a.w.w(0, 1) - cplx(0.1, 0.1)) < 1e-15);
  CHECK(a.tau.tau() == 0.5);

  CHECK(normalize_action({100.0, 1, 0, 0, 0}, p).tau.tau() == 1.0 - 1e-3);
  CHECK(normalize_action({-100.0, 1, 0, 0, 0}, p).tau.tau() == 1e-3);
  CHECK_THROWS_AS(normalize_action({0.0, 0, 0, 0, 0}, p), AllZeroBeams);
  CHECK_THROWS_AS(normalize_action({0.0, 1, 0, 0}, p), InvalidArgument);
  CHECK_THROWS_AS(normalize_action({0.0, NAN, 0, 0, 0}, p), InvalidArgument);
}

TEST_CASE("normalized beams sit on the budget and keep their directions") {
  SystemParams p;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> raw(action_length(4, 10));
    for (double& v : raw) v = nd(rng) * std::pow(10.0, rep % 7 - 3);
    const NormalizedAction a = normalize_action(raw, p);
    CHECK(rel_err(a.w.total_power(), p.p_max) < 1e-12);
    const BeamformingSet orig =
        unlift(Eigen::Map<const RVector>(raw.data() + 1, 80), 4, 10);
    for (int k = 0; k < 4; ++k) {
      const CVector u = orig.w.col(k).normalized();
      const CVector v = a.w.w.col(k).normalized();
      CHECK((u - v).norm() < 1e-12);
    }
  }
}

TEST_CASE("reward equals EE when feasible and zero otherwise") {
  SystemParams p;
  const ChannelSet c = draw_trial_channels(p, 5);
  const Scenario s(c, p);
  const Solution sol = alternating_optimize(s);
  const double r = compute_reward(sol.w, sol.tau, c, p);
  CHECK(r == sol.rates.ee);
  CHECK(rel_err(r, s.rates(sol.w, sol.tau).ee) < 1e-12);

  // All power on the strongest user starves the weakest.
  CMatrix w = CMatrix::Zero(10, 4);
  w.col(3) = c.h[3].normalized() * std::sqrt(p.p_max);
  CHECK(compute_reward(BeamformingSet(w), TimeSwitch::from_tau(0.5), c, p) == 0.0);
}

TEST_CASE("single user reward matches the rates report exactly") {
  SystemParams p;
  p.users = 1;
  p.antennas = 2;
  const ChannelSet c = draw_trial_channels(p, 2);
  CMatrix w(2, 1);
  w.col(0) = c.h[0].normalized() * std::sqrt(p.p_max);
  const TimeSwitch ts = TimeSwitch::from_tau(0.3);
  const double r = compute_reward(BeamformingSet(w), ts, c, p);
  CHECK(r > 0.0);
  CHECK(r == stage_rates(BeamformingSet(w), ts, c, p).ee);
}

TEST_CASE("normalized action is no worse than the same directions at lower power") {
  SystemParams p;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ChannelSet c = draw_trial_channels(p, trial_seed(40, seed));
    const Solution sol = alternating_optimize(c, p);
    const NormalizedAction a = normalize_action(action_from(sol.w, std::log(sol.tau.tau() / (1 - sol.tau.tau()))), p);
    const double full = compute_reward(a.w, a.tau, c, p);
    CHECK(full > 0.0);
    for (double scale : {0.5, 0.8, 0.95}) {
      const BeamformingSet low(a.w.w * scale);
      const double r = compute_reward(low, a.tau, c, p);
      if (r > 0.0) CHECK(full >= r);
    }
  }
}

TEST_CASE("state layout") {
  SystemParams p;
  p.users = 3;
  p.antennas = 2;
  const ChannelSet c = draw_trial_channels(p, 9);
  std::mt19937_64 rng(1);
  const BeamformingSet w = testing_support::random_beams(3, 2, 0.1, rng);
  const RatesReport r = stage_rates(w, TimeSwitch::from_tau(0.4), c, p);
  const auto s = env_state(c, &r, &w);
  REQUIRE(s.size() == state_length(3));
  CHECK(s[0] == c.h[0].squaredNorm());
  CHECK(s[3] == c.h_dt.squaredNorm());
  CHECK(s[4] == c.h_dr.squaredNorm());
  CHECK(s[5] == std::norm(c.h_dd));
  CHECK(s[6] == std::norm(c.h_dk[0]));
  CHECK(s[9] == r.own[0]);
  CHECK(s[12] == r.cross.at({1, 0}));
  CHECK(s[13] == r.cross.at({2, 0}));
  CHECK(s[14] == r.cross.at({2, 1}));
  CHECK(s[15] == w.w.col(0).squaredNorm());
  const auto empty = env_state(c, nullptr, nullptr);
  for (std::size_t i = 9; i < empty.size(); ++i) CHECK(empty[i] == 0.0);
}

TEST_CASE("protocol session") {
  BridgeOptions opt;
  opt.mode = EnvMode::redraw;
  opt.seed = 3;
  std::vector<double> zeros(action_length(4, 10), 0.0);
  std::vector<double> ones(action_length(4, 10), 1.0);
  const std::string input = json{{"cmd", "reset"}, {"seed", 11}}.dump() + "\n" +
                            json{{"cmd", "step"}, {"action", zeros}}.dump() + "\n" +
                            json{{"cmd", "step"}, {"action", ones}}.dump() + "\n" +
                            "this is not json\n" +
                            json{{"cmd", "fly"}}.dump() + "\n" +
                            json{{"cmd", "step"}, {"action", {1.0, 2.0}}}.dump() + "\n" +
                            json{{"cmd", "reset"}, {"seed", 11}}.dump() + "\n" +
                            json{{"cmd", "close"}}.dump() + "\n" +
                            json{{"cmd", "reset"}}.dump() + "\n";
  const auto r = session(input, opt);
  REQUIRE(r.size() == 8);
  CHECK(r[0]["state"].size() == 25);
  CHECK(r[0]["k"] == 4);
  CHECK(r[0]["m"] == 10);
  CHECK(r[1]["reward"] == 0.0);
  CHECK(r[1]["feasible"] == false);
  CHECK(r[2]["state"].size() == 25);
  CHECK(r[2].contains("reward"));
  CHECK(r[2]["rates"]["own"].size() == 4);
  CHECK(r[2]["state"][24].get<double>() > 0.0);
  for (int i : {3, 4, 5}) {
    CHECK(r[i].contains("error"));
    CHECK(r[i]["fatal"] == false);
  }
  CHECK(r[6]["state"] == r[0]["state"]);
  CHECK(r[7]["closed"] == true);
}

TEST_CASE("step before reset is a recoverable error") {
  BridgeOptions opt;
  const auto r = session(json{{"cmd", "step"}, {"action", {0.0}}}.dump() + "\n", opt);
  REQUIRE(r.size() == 1);
  CHECK(r[0]["fatal"] == false);
}

TEST_CASE("fixed mode keeps the channel, redraw mode changes it") {
  BridgeOptions fixed;
  fixed.seed = 5;
  const std::string two_resets = json{{"cmd", "reset"}}.dump() + "\n" + json{{"cmd", "reset"}}.dump() + "\n";
  const auto a = session(two_resets, fixed);
  CHECK(a[0]["state"] == a[1]["state"]);

  BridgeOptions redraw = fixed;
  redraw.mode = EnvMode::redraw;
  const auto b = session(two_resets, redraw);
  CHECK(b[0]["state"] != b[1]["state"]);
}

TEST_CASE("bridge reward matches the experiment EE for the same channels") {
  BridgeOptions opt;
  opt.mode = EnvMode::redraw;
  const std::uint64_t seed = 77;
  const ChannelSet c = draw_trial_channels(opt.params, seed);
  const Solution sol = alternating_optimize(c, opt.params);
  const double tau = sol.tau.tau();
  const auto action = action_from(sol.w, std::log(tau / (1 - tau)));
  const auto r = session(json{{"cmd", "reset"}, {"seed", seed}}.dump() + "\n" +
                             json{{"cmd", "step"}, {"action", action}}.dump() + "\n",
                         opt);
  REQUIRE(r.size() == 2);
  const NormalizedAction a = normalize_action(action, opt.params);
  const double expected = Scenario(c, opt.params).rates(a.w, a.tau).ee;
  CHECK(r[1]["feasible"] == true);
  CHECK(std::abs(r[1]["reward"].get<double>() - expected) <= 1e-12 * expected);
  CHECK(rel_err(r[1]["reward"].get<double>(), sol.ee) < 1e-6);
}

TEST_CASE("imperfect environment uses the error realization") {
  BridgeOptions opt;
  opt.sigma_eps2 = 1e-3;
  std::vector<double> ones(action_length(4, 10), 1.0);
  const auto r = session(json{{"cmd", "reset"}}.dump() + "\n" +
                             json{{"cmd", "step"}, {"action", ones}}.dump() + "\n",
                         opt);
  BridgeOptions perfect;
  const auto q = session(json{{"cmd", "reset"}}.dump() + "\n" +
                             json{{"cmd", "step"}, {"action", ones}}.dump() + "\n",
                         perfect);
  CHECK(r[1]["ee"] != q[1]["ee"]);
}
