#pragma once

#include <map>
#include <utility>
#include <vector>

#include "eed2d/channel_model.hpp"
#include "eed2d/params.hpp"
#include "eed2d/types.hpp"

namespace eed2d {

/// K complex beamforming vectors stored as the columns of an M x K matrix.
struct BeamformingSet {
  CMatrix w;

  BeamformingSet() = default;
  explicit BeamformingSet(CMatrix beams) : w(std::move(beams)) {}
  static BeamformingSet zeros(int users, int antennas) {
    return BeamformingSet(CMatrix::Zero(antennas, users));
  }

  int users() const { return static_cast<int>(w.cols()); }
  int antennas() const { return static_cast<int>(w.rows()); }
  double total_power() const { return w.squaredNorm(); }
  bool within_budget(const SystemParams& params, double rel_tol = 1e-8) const {
    return total_power() <= params.p_max * (1.0 + rel_tol);
  }
};

/// Harvesting fraction tau of the unit slot and its transform tau_bar = tau / (1 - tau).
class TimeSwitch {
 public:
  /// tau in [0, 1]; tau = 1 is representable (tau_bar = +inf) but has no transmission phase.
  static TimeSwitch from_tau(double tau);
  static TimeSwitch from_tau_bar(double tau_bar);

  double tau() const { return tau_; }
  double tau_bar() const { return tau_bar_; }

 private:
  TimeSwitch(double tau, double tau_bar) : tau_(tau), tau_bar_(tau_bar) {}
  double tau_ = 0.0;
  double tau_bar_ = 0.0;
};

struct LinkSinr {
  double stage1 = 0.0;  // harvesting phase, no D2D interference
  double stage2 = 0.0;  // transmission phase, D2D interference present
};

/// Every rate, power and energy quantity of one (W, tau) operating point.
/// User indices are 0-based SIC positions; cross entries are keyed (t, k) with k < t.
struct RatesReport {
  std::vector<double> own;                       // R_k over the whole slot
  std::map<std::pair<int, int>, double> cross;   // R_{k->t} over the whole slot
  std::vector<LinkSinr> own_sinr;
  std::map<std::pair<int, int>, LinkSinr> cross_sinr;
  double d2d_rate = 0.0;     // R_D
  double harvested = 0.0;    // P_r
  double transmit = 0.0;     // P_t
  double energy = 0.0;       // E_c
  double ee = 0.0;           // R_D / E_c
};

struct QosMargin {
  int user = 0;     // stream being decoded (k)
  int decoder = 0;  // receiving user (t >= k)
  double value = 0.0;  // SINR - gamma_min in the transmission phase
};

struct QosReport {
  bool feasible = true;
  std::vector<QosMargin> margins;
};

inline constexpr double kQosTolerance = 1e-9;

/// Sum_k |h_dt^H w_k|^2.
double harvested_power(const BeamformingSet& w, const CVector& h_dt);

/// eta * tau_bar * P_r. Throws InvalidArgument for tau = 1.
double d2d_transmit_power(const TimeSwitch& ts, double eta, double p_r);

RatesReport stage_rates(const BeamformingSet& w, const TimeSwitch& ts, const ChannelSet& channels,
                        const SystemParams& params);

/// Rates with channel-estimation error: transmission-phase user rates see the extra
/// interference Sum_k |eps_k^H w_k|^2 and the D2D link sees P_t |eps_dd|^2.
/// Desired and SIC terms use the channels passed in.
RatesReport imperfect_rates(const BeamformingSet& w, const TimeSwitch& ts,
                            const ChannelSet& estimated, const CsiErrorRealization& realization,
                            const SystemParams& params);

/// Equal-share TDMA baseline: each phase split into K sub-slots, only w_k active in
/// sub-slot k. `realization` may be null for perfect CSI.
RatesReport oma_rates(const BeamformingSet& w, const TimeSwitch& ts, const ChannelSet& channels,
                      const SystemParams& params, const CsiErrorRealization* realization = nullptr);

/// Reduced (tau-free) QoS check on transmission-phase SINRs of a rates report.
/// `gamma` is the SINR threshold (gamma_min for NOMA).
QosReport qos_from_rates(const RatesReport& rates, double gamma);

QosReport qos_feasible(const BeamformingSet& w, const TimeSwitch& ts, const ChannelSet& channels,
                       const SystemParams& params);

}  // namespace eed2d
