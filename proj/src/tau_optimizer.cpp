#include "eed2d/tau_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "eed2d/errors.hpp"

namespace eed2d {

double TauSubproblemCoefficients::numerator(double tau_bar) const {
  if (a == 0.0 || tau_bar == 0.0) return 0.0;
  return std::log2(1.0 + a * tau_bar / (1.0 + l * tau_bar));
}

std::vector<TauConstraint> TauSubproblemCoefficients::constraints() const {
  std::vector<TauConstraint> out;
  for (std::size_t k = 0; k < f.size(); ++k)
    out.push_back({static_cast<int>(k), static_cast<int>(k), f[k], g[k], g_scale[k]});
  for (const auto& [key, offset] : e)
    out.push_back({key.first, key.second, d[static_cast<std::size_t>(key.second)], offset,
                   e_scale.at(key)});
  return out;
}

TauSubproblemCoefficients compute_tau_objective(const BeamformingSet& w,
                                                const Scenario& scenario) {
  const SystemParams& p = scenario.params();
  const double p_r = scenario.harvested(w);
  const double floor = scenario.d2d_interference(w) + p.sigma2;
  TauSubproblemCoefficients out;
  out.a = p.eta * p_r * std::norm(scenario.channels().h_dd) / floor;
  out.l = p.eta * p_r * scenario.d2d_error_gain() / floor;
  out.b = p.eta * p_r + p.p_c;
  out.c = p.p_c;
  return out;
}

TauSubproblemCoefficients compute_tau_coefficients(const BeamformingSet& w,
                                                   const Scenario& scenario) {
  const double gamma = scenario.gamma();
  if (!(gamma > 0.0))
    throw InvalidArgument("tau constraints need a positive SINR threshold (R_min > 0)");
  TauSubproblemCoefficients out = compute_tau_objective(w, scenario);
  out.gamma = gamma;
  const SystemParams& p = scenario.params();
  const double p_r = scenario.harvested(w);
  const auto k_users = static_cast<std::size_t>(scenario.users());
  out.d.assign(k_users, 0.0);
  out.f.assign(k_users, 0.0);
  out.g.assign(k_users, 0.0);
  out.g_scale.assign(k_users, 0.0);
  for (std::size_t t = 0; t < k_users; ++t)
    out.d[t] = p.eta * p_r * std::norm(scenario.channels().h_dk[t]);
  for (const QosLink& link : scenario.links()) {
    const double base = scenario.link_interference(w, link) + p.sigma2;
    const double offset = base - std::norm(scenario.link_amplitude(w, link)) / gamma;
    const auto k = static_cast<std::size_t>(link.user);
    if (link.user == link.decoder) {
      out.f[k] = out.d[k];
      out.g[k] = offset;
      out.g_scale[k] = base;
    } else {
      out.e[{link.user, link.decoder}] = offset;
      out.e_scale[{link.user, link.decoder}] = base;
    }
  }
  return out;
}

TauSubproblemCoefficients compute_tau_coefficients(const BeamformingSet& w,
                                                   const ChannelSet& channels,
                                                   const SystemParams& params) {
  return compute_tau_coefficients(w, Scenario(channels, params));
}

TauInterval tau_feasible_interval(const TauSubproblemCoefficients& coeffs, double sinr_tol) {
  TauInterval out;
  for (const TauConstraint& c : coeffs.constraints()) {
    // At tau_bar = 0: SINR >= gamma - tol  <=>  offset <= scale * tol / gamma.
    const double allowance = coeffs.gamma > 0.0 ? c.scale * sinr_tol / coeffs.gamma : 0.0;
    if (c.offset > allowance)
      throw Infeasible("QoS of user " + std::to_string(c.user) + " at decoder " +
                       std::to_string(c.decoder) + " fails for every tau_bar >= 0");
    if (c.slope > 0.0) out.hi = std::min(out.hi, std::max(0.0, -c.offset / c.slope));
  }
  return out;
}

double dinkelbach_inner(const TauSubproblemCoefficients& coeffs, double q,
                        const TauInterval& interval) {
  if (coeffs.a <= 0.0) return interval.lo;
  if (q <= 0.0) return interval.hi;
  // Stationary point of log2((1 + (A+L)x) / (1 + Lx)) - q(Bx + C):
  // L(L+A) x^2 + (2L+A) x + 1 - R = 0 with R = A / (q B ln 2).
  const double r = coeffs.a / (q * coeffs.b * std::log(2.0));
  double x = 0.0;
  if (r > 1.0) {
    const double qa = coeffs.l * (coeffs.l + coeffs.a);
    const double qb = 2.0 * coeffs.l + coeffs.a;
    x = 2.0 * (r - 1.0) / (qb + std::sqrt(qb * qb + 4.0 * qa * (r - 1.0)));
  }
  return std::clamp(x, interval.lo, interval.hi);
}

DinkelbachResult dinkelbach_solve(const TauSubproblemCoefficients& coeffs,
                                  const TauInterval& interval,
                                  const DinkelbachOptions& options) {
  if (!(interval.hi >= interval.lo)) throw InvalidArgument("empty tau_bar interval");
  DinkelbachResult out;
  double q = options.q0.value_or(0.0);
  if (q <= 0.0 && std::isinf(interval.hi) && coeffs.a > 0.0)
    q = coeffs.ratio(std::max(interval.lo, 1.0));
  out.q_trace.push_back(q);
  for (int it = 1; it <= options.max_iterations; ++it) {
    const double x = dinkelbach_inner(coeffs, q, interval);
    const double f = coeffs.numerator(x) - q * coeffs.denominator(x);
    out.tau_bar = x;
    out.f_value = f;
    out.iterations = it;
    const double next = coeffs.ratio(x);
    if (std::abs(f) < options.tol) {
      out.q = next;
      out.q_trace.push_back(next);
      return out;
    }
    q = next;
    out.q_trace.push_back(q);
  }
  throw NonConvergence("Dinkelbach iteration did not reach |F(q)| < tol");
}

DinkelbachResult dinkelbach_solve(const TauSubproblemCoefficients& coeffs,
                                  const DinkelbachOptions& options) {
  return dinkelbach_solve(coeffs, tau_feasible_interval(coeffs), options);
}

}  // namespace eed2d
