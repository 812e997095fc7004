#include "eed2d/link_physics.hpp"

#include <cmath>
#include <limits>

#include "eed2d/errors.hpp"

namespace eed2d {

void SystemParams::validate() const {
  if (users < 1) throw InvalidArgument("users must be >= 1");
  if (antennas < 1) throw InvalidArgument("antennas must be >= 1");
  if (!(p_max > 0.0)) throw InvalidArgument("p_max must be > 0");
  if (!(sigma2 > 0.0)) throw InvalidArgument("sigma2 must be > 0");
  if (!(p_c > 0.0)) throw InvalidArgument("p_c must be > 0");
  if (!(eta > 0.0 && eta <= 1.0)) throw InvalidArgument("eta must lie in (0, 1]");
  if (!(r_min >= 0.0)) throw InvalidArgument("r_min must be >= 0");
}

TimeSwitch TimeSwitch::from_tau(double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw InvalidArgument("tau must lie in [0, 1]");
  const double tau_bar =
      tau < 1.0 ? tau / (1.0 - tau) : std::numeric_limits<double>::infinity();
  return {tau, tau_bar};
}

TimeSwitch TimeSwitch::from_tau_bar(double tau_bar) {
  if (!(tau_bar >= 0.0)) throw InvalidArgument("tau_bar must be >= 0");
  if (std::isinf(tau_bar)) return {1.0, tau_bar};
  return {tau_bar / (1.0 + tau_bar), tau_bar};
}

double harvested_power(const BeamformingSet& w, const CVector& h_dt) {
  if (w.antennas() != h_dt.size()) throw InvalidArgument("beam and channel lengths differ");
  return (w.w.adjoint() * h_dt).squaredNorm();
}

double d2d_transmit_power(const TimeSwitch& ts, double eta, double p_r) {
  if (ts.tau() >= 1.0) throw InvalidArgument("tau = 1 leaves no transmission phase");
  return eta * ts.tau_bar() * p_r;
}

namespace {

void check_dims(const BeamformingSet& w, const ChannelSet& ch) {
  if (w.users() != ch.users() || w.antennas() != ch.antennas())
    throw InvalidArgument("beamforming set is not dimensioned K x M for these channels");
}

double log2p1(double x) { return std::log2(1.0 + x); }

// P_t, with tau = 1 reported as no transmission (P_t = 0, stage-2 rates weighted by zero).
double transmit_power_or_zero(const TimeSwitch& ts, double eta, double p_r) {
  return ts.tau() < 1.0 ? d2d_transmit_power(ts, eta, p_r) : 0.0;
}

double d2d_rate(double tau, double p_t, double gain_dd, double interference, double err_dd,
                double sigma2) {
  if (tau >= 1.0) return 0.0;
  return (1.0 - tau) * log2p1(p_t * gain_dd / (interference + p_t * err_dd + sigma2));
}

RatesReport noma_rates(const BeamformingSet& w, const TimeSwitch& ts, const ChannelSet& ch,
                       const SystemParams& params, const CsiErrorRealization* err) {
  check_dims(w, ch);
  const int k_users = ch.users();
  const double tau = ts.tau();
  const double s2 = params.sigma2;

  RatesReport r;
  r.harvested = harvested_power(w, ch.h_dt);
  r.transmit = transmit_power_or_zero(ts, params.eta, r.harvested);
  const double p_i = (w.w.adjoint() * ch.h_dr).squaredNorm();

  double err_users = 0.0;
  double err_dd = 0.0;
  if (err != nullptr) {
    if (static_cast<int>(err->eps.size()) != k_users)
      throw InvalidArgument("CSI error realization does not match the channel set");
    for (int k = 0; k < k_users; ++k)
      err_users += std::norm(err->eps[static_cast<std::size_t>(k)].dot(w.w.col(k)));
    err_dd = std::norm(err->eps_dd);
  }

  r.own.assign(static_cast<std::size_t>(k_users), 0.0);
  r.own_sinr.assign(static_cast<std::size_t>(k_users), LinkSinr{});
  for (int t = 0; t < k_users; ++t) {
    const CVector& h_t = ch.h[static_cast<std::size_t>(t)];
    // gains(j) = |h_t^H w_j|^2
    const RVector gains = (w.w.adjoint() * h_t).cwiseAbs2();
    const double d2d = r.transmit * std::norm(ch.h_dk[static_cast<std::size_t>(t)]);
    for (int k = 0; k <= t; ++k) {
      const double intra = gains.tail(k_users - k - 1).sum();
      LinkSinr sinr;
      sinr.stage1 = gains(k) / (intra + s2);
      sinr.stage2 = gains(k) / (d2d + intra + err_users + s2);
      const double rate = tau * log2p1(sinr.stage1) + (1.0 - tau) * log2p1(sinr.stage2);
      if (k == t) {
        r.own[static_cast<std::size_t>(k)] = rate;
        r.own_sinr[static_cast<std::size_t>(k)] = sinr;
      } else {
        r.cross[{t, k}] = rate;
        r.cross_sinr[{t, k}] = sinr;
      }
    }
  }
  r.d2d_rate = d2d_rate(tau, r.transmit, std::norm(ch.h_dd), p_i, err_dd, s2);
  r.energy = params.eta * tau * r.harvested + params.p_c;
  r.ee = r.d2d_rate / r.energy;
  return r;
}

}  // namespace

RatesReport stage_rates(const BeamformingSet& w, const TimeSwitch& ts, const ChannelSet& channels,
                        const SystemParams& params) {
  return noma_rates(w, ts, channels, params, nullptr);
}

RatesReport imperfect_rates(const BeamformingSet& w, const TimeSwitch& ts,
                            const ChannelSet& estimated, const CsiErrorRealization& realization,
                            const SystemParams& params) {
  return noma_rates(w, ts, estimated, params, &realization);
}

RatesReport oma_rates(const BeamformingSet& w, const TimeSwitch& ts, const ChannelSet& ch,
                      const SystemParams& params, const CsiErrorRealization* err) {
  check_dims(w, ch);
  const int k_users = ch.users();
  const double share = 1.0 / k_users;
  const double tau = ts.tau();
  const double s2 = params.sigma2;

  RatesReport r;
  r.harvested = share * harvested_power(w, ch.h_dt);
  r.transmit = transmit_power_or_zero(ts, params.eta, r.harvested);
  const double p_i = share * (w.w.adjoint() * ch.h_dr).squaredNorm();
  if (err != nullptr && static_cast<int>(err->eps.size()) != k_users)
    throw InvalidArgument("CSI error realization does not match the channel set");

  r.own.assign(static_cast<std::size_t>(k_users), 0.0);
  r.own_sinr.assign(static_cast<std::size_t>(k_users), LinkSinr{});
  for (int k = 0; k < k_users; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    const double gain = std::norm(ch.h[ks].dot(w.w.col(k)));
    const double err_k = err != nullptr ? std::norm(err->eps[ks].dot(w.w.col(k))) : 0.0;
    LinkSinr sinr;
    sinr.stage1 = gain / s2;
    sinr.stage2 = gain / (r.transmit * std::norm(ch.h_dk[ks]) + err_k + s2);
    r.own_sinr[ks] = sinr;
    r.own[ks] = share * (tau * log2p1(sinr.stage1) + (1.0 - tau) * log2p1(sinr.stage2));
  }
  const double err_dd = err != nullptr ? std::norm(err->eps_dd) : 0.0;
  r.d2d_rate = d2d_rate(tau, r.transmit, std::norm(ch.h_dd), p_i, err_dd, s2);
  r.energy = params.eta * tau * r.harvested + params.p_c;
  r.ee = r.d2d_rate / r.energy;
  return r;
}

QosReport qos_from_rates(const RatesReport& rates, double gamma) {
  QosReport q;
  const int k_users = static_cast<int>(rates.own_sinr.size());
  for (int k = 0; k < k_users; ++k) {
    q.margins.push_back({k, k, rates.own_sinr[static_cast<std::size_t>(k)].stage2 - gamma});
    for (int t = k + 1; t < k_users; ++t) {
      const auto it = rates.cross_sinr.find({t, k});
      if (it != rates.cross_sinr.end()) q.margins.push_back({k, t, it->second.stage2 - gamma});
    }
  }
  for (const QosMargin& m : q.margins)
    if (!(m.value >= -kQosTolerance)) q.feasible = false;
  return q;
}

QosReport qos_feasible(const BeamformingSet& w, const TimeSwitch& ts, const ChannelSet& channels,
                       const SystemParams& params) {
  return qos_from_rates(stage_rates(w, ts, channels, params), params.gamma_min());
}

}  // namespace eed2d
