#include "eed2d/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include "eed2d/errors.hpp"

namespace eed2d {

const char* to_string(Access access) { return access == Access::noma ? "noma" : "oma"; }

const char* to_string(Algorithm algorithm) {
  return algorithm == Algorithm::alt ? "alt" : "exhaustive";
}

namespace {

constexpr double kBudgetFill = 1.0 - 1e-9;

BeamformingSet from_powers(const std::vector<CVector>& dirs, const std::vector<double>& p) {
  CMatrix w(dirs.front().size(), static_cast<Eigen::Index>(dirs.size()));
  for (std::size_t k = 0; k < dirs.size(); ++k)
    w.col(static_cast<Eigen::Index>(k)) = std::sqrt(p[k]) * dirs[k];
  return BeamformingSet(std::move(w));
}

bool strictly_feasible(const Scenario& s, const BeamformingSet& w, double tau_bar) {
  if (!s.power_feasible(w, 0.0)) return false;
  if (!s.qos_active()) return true;
  for (double m : s.margins(w, tau_bar))
    if (!(m > 0.0)) return false;
  return true;
}

ReducedScenario prepare(const Scenario& scenario, bool reduce) {
  if (reduce) return reduce_to_signal_subspace(scenario);
  const int m = scenario.antennas();
  return {scenario, CMatrix::Identity(m, m)};
}

Solution finish(const Scenario& full, const ReducedScenario& reduced, const BeamformingSet& w,
                double tau_bar, Solution sol) {
  sol.w = reduced.expand(w);
  sol.tau = TimeSwitch::from_tau_bar(tau_bar);
  sol.ee = full.energy_efficiency(sol.w, tau_bar);
  sol.rates = full.rates(sol.w, sol.tau);
  sol.scheme = full.access();
  return sol;
}

}  // namespace

std::optional<BeamformingSet> initialize_at(const Scenario& s, double tau_bar, double boost) {
  const SystemParams& p = s.params();
  const auto k_users = static_cast<std::size_t>(s.users());
  std::vector<CVector> dirs;
  for (const CVector& h : s.channels().h) {
    const double norm = h.norm();
    if (!(norm > 0.0)) return std::nullopt;
    dirs.push_back(h / norm);
  }
  const bool oma = s.access() == Access::oma;
  std::vector<double> pw(k_users, oma ? p.p_max : p.p_max / static_cast<double>(k_users));

  if (s.qos_active()) {
    std::vector<double> cur(k_users, 0.0);
    std::vector<double> next(k_users, 0.0);
    const double target = boost * s.gamma();
    bool settled = false;
    for (int it = 0; it < 10000 && !settled; ++it) {
      const BeamformingSet w = from_powers(dirs, cur);
      const double p_t = p.eta * tau_bar * s.harvested(w);
      std::fill(next.begin(), next.end(), 0.0);
      for (const QosLink& link : s.links()) {
        const CVector& h_t = s.channels().h[static_cast<std::size_t>(link.decoder)];
        const double g = std::norm(h_t.dot(dirs[static_cast<std::size_t>(link.user)]));
        if (!(g > 0.0)) return std::nullopt;
        const double den = p_t * s.link_d2d_gain(link) + s.link_interference(w, link) + p.sigma2;
        auto& slot = next[static_cast<std::size_t>(link.user)];
        slot = std::max(slot, target * den / g);
      }
      double total = 0.0;
      double peak = 0.0;
      double change = 0.0;
      for (std::size_t k = 0; k < k_users; ++k) {
        total += next[k];
        peak = std::max(peak, next[k]);
        change = std::max(change, std::abs(next[k] - cur[k]));
      }
      if ((oma ? peak : total) > p.p_max) return std::nullopt;
      settled = change <= 1e-12 * peak;
      cur.swap(next);
    }
    double scale = std::numeric_limits<double>::infinity();
    if (oma) {
      for (double v : cur) scale = std::min(scale, p.p_max / v);
    } else {
      double total = 0.0;
      for (double v : cur) total += v;
      scale = p.p_max / total;
    }
    for (std::size_t k = 0; k < k_users; ++k) pw[k] = cur[k] * scale;
  }
  for (double& v : pw) v *= kBudgetFill;
  BeamformingSet w = from_powers(dirs, pw);
  if (!strictly_feasible(s, w, tau_bar)) return std::nullopt;
  return w;
}

InitialPoint feasible_initialization(const Scenario& scenario) {
  double tau = 0.5;
  for (int i = 0; i <= 30; ++i, tau *= 0.5) {
    const TimeSwitch ts = TimeSwitch::from_tau(i == 30 ? 0.0 : tau);
    if (auto w = initialize_at(scenario, ts.tau_bar())) return {std::move(*w), ts};
  }
  throw Infeasible("no feasible initial point: QoS cannot be met within the power budget");
}

InitialPoint feasible_initialization(const ChannelSet& channels, const SystemParams& params) {
  return feasible_initialization(Scenario(channels, params));
}

Solution alternating_optimize(const Scenario& scenario, const AlternatingOptions& options) {
  const ReducedScenario reduced = prepare(scenario, options.reduce);
  const Scenario& s = reduced.scenario;
  const InitialPoint init = feasible_initialization(s);

  BeamformingSet w = init.w;
  double tau_bar = init.tau.tau_bar();
  double ee = s.energy_efficiency(w, tau_bar);
  Solution sol;
  sol.algorithm = Algorithm::alt;
  sol.initial_ee = ee;
  sol.trace.push_back(ee);

  for (int it = 1; it <= options.max_outer; ++it) {
    const AuxiliaryVars aux = update_auxiliaries(w, tau_bar, s);
    const ConvexProgram program = build_subproblem(aux, tau_bar, s);
    try {
      const BarrierResult res = barrier_solve_retrying(program, lift(w), options.solver);
      BeamformingSet next = unlift(res.x, s.users(), s.antennas());
      if (s.energy_efficiency(next, tau_bar) >= ee) w = std::move(next);
    } catch (const LineSearchStall&) {
    }

    const double q = s.energy_efficiency(w, tau_bar);
    TauSubproblemCoefficients coeffs;
    TauInterval interval;
    if (s.qos_active()) {
      coeffs = compute_tau_coefficients(w, s);
      interval = tau_feasible_interval(coeffs);
      if (std::isfinite(interval.hi)) interval.hi *= 1.0 - options.tau_margin;
    } else {
      coeffs = compute_tau_objective(w, s);
    }
    DinkelbachOptions dk = options.dinkelbach;
    dk.q0 = q;
    const DinkelbachResult tau_step = dinkelbach_solve(coeffs, interval, dk);
    if (coeffs.ratio(tau_step.tau_bar) >= q && strictly_feasible(s, w, tau_step.tau_bar))
      tau_bar = tau_step.tau_bar;

    const double ee_new = s.energy_efficiency(w, tau_bar);
    sol.trace.push_back(ee_new);
    sol.iterations = it;
    const double change = std::abs(ee_new - ee) / std::max(std::abs(ee), 1e-300);
    ee = ee_new;
    if (change < options.tol) {
      sol.converged = true;
      break;
    }
  }
  return finish(scenario, reduced, w, tau_bar, std::move(sol));
}

Solution alternating_optimize(const ChannelSet& channels, const SystemParams& params,
                              const AlternatingOptions& options) {
  return alternating_optimize(Scenario(channels, params), options);
}

std::vector<double> exhaustive_grid(double xi) {
  if (!(xi > 0.0)) throw InvalidArgument("grid step must be > 0");
  std::vector<double> out;
  for (int i = 0;; ++i) {
    const double tau = 0.001 + i * xi;
    if (tau > 0.999 + 1e-12) break;
    out.push_back(tau);
  }
  return out;
}

Solution exhaustive_tau_optimize(const Scenario& scenario, const ExhaustiveOptions& options) {
  const ReducedScenario reduced = prepare(scenario, options.reduce);
  const Scenario& s = reduced.scenario;
  const std::vector<double> grid = exhaustive_grid(options.xi);
  const auto n = static_cast<int>(grid.size());

  struct Point {
    bool feasible = false;
    double ee = 0.0;
    double initial_ee = 0.0;
    int rounds = 0;
    BeamformingSet w;
  };
  std::vector<Point> points(grid.size());
  std::vector<std::exception_ptr> errors(grid.size());
#pragma omp parallel for schedule(dynamic) if (options.parallel)
  for (int i = 0; i < n; ++i) {
    const double tau_bar = TimeSwitch::from_tau(grid[static_cast<std::size_t>(i)]).tau_bar();
    auto w0 = initialize_at(s, tau_bar);
    if (!w0) continue;
    BeamSolveResult r;
    try {
      r = solve_beams(s, tau_bar, *w0, options.beam);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
      continue;
    }
    Point& pt = points[static_cast<std::size_t>(i)];
    pt.feasible = true;
    pt.ee = r.trace.back();
    pt.initial_ee = r.trace.front();
    pt.rounds = r.rounds;
    pt.w = std::move(r.w);
  }

  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  Solution sol;
  sol.algorithm = Algorithm::exhaustive;
  sol.converged = true;
  int best = -1;
  for (int i = 0; i < n; ++i) {
    const Point& pt = points[static_cast<std::size_t>(i)];
    if (!pt.feasible) continue;
    sol.trace.push_back(pt.ee);
    sol.iterations += pt.rounds;
    if (best < 0 || pt.ee > points[static_cast<std::size_t>(best)].ee) best = i;
  }
  if (best < 0) throw Infeasible("every tau on the grid is infeasible");
  const Point& pt = points[static_cast<std::size_t>(best)];
  sol.initial_ee = pt.initial_ee;
  return finish(scenario, reduced, pt.w,
                TimeSwitch::from_tau(grid[static_cast<std::size_t>(best)]).tau_bar(),
                std::move(sol));
}

Solution exhaustive_tau_optimize(const ChannelSet& channels, const SystemParams& params,
                                 const ExhaustiveOptions& options) {
  return exhaustive_tau_optimize(Scenario(channels, params), options);
}

Solution oma_baseline_optimize(const ChannelSet& channels, const SystemParams& params,
                               const AlternatingOptions& options,
                               const CsiErrorRealization* error) {
  std::optional<CsiErrorRealization> err;
  if (error) err = *error;
  return alternating_optimize(Scenario(channels, params, Access::oma, std::move(err)), options);
}

}  // namespace eed2d
