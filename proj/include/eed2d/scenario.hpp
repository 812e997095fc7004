#pragma once

#include <optional>
#include <vector>

#include "eed2d/channel_model.hpp"
#include "eed2d/link_physics.hpp"

namespace eed2d {

enum class Access { noma, oma };

/// One reduced QoS constraint: `decoder` must decode the stream of `user` (decoder >= user).
struct QosLink {
  int user = 0;
  int decoder = 0;
};

/// The optimization-facing view of a scenario: channels + params + access scheme + optional
/// CSI error, exposing every term of the EE objective and of the QoS constraints as functions
/// of (W, tau_bar).
///
/// NOMA links are all pairs user <= decoder; OMA links are the K own-signal links with no
/// intra-user interference, threshold 2^(K R_min) - 1 and per-beam power budgets.
class Scenario {
 public:
  Scenario(ChannelSet channels, SystemParams params, Access access = Access::noma,
           std::optional<CsiErrorRealization> error = std::nullopt);

  const ChannelSet& channels() const { return channels_; }
  const SystemParams& params() const { return params_; }
  Access access() const { return access_; }
  const CsiErrorRealization* error() const { return error_ ? &*error_ : nullptr; }
  int users() const { return channels_.users(); }
  int antennas() const { return channels_.antennas(); }

  /// SINR threshold applied to every link.
  double gamma() const;
  bool qos_active() const { return gamma() > 0.0; }
  /// Time share of each beam: 1 for NOMA, 1/K for OMA.
  double share() const;
  const std::vector<QosLink>& links() const { return links_; }
  /// Users whose beams interfere on `link` through h_decoder (SIC residual).
  std::vector<int> interferers(const QosLink& link) const;
  /// Users whose beams leak through the CSI error on `link`.
  std::vector<int> error_terms(const QosLink& link) const;

  double harvested(const BeamformingSet& w) const;
  double d2d_interference(const BeamformingSet& w) const;
  double d2d_error_gain() const;
  cplx link_amplitude(const BeamformingSet& w, const QosLink& link) const;
  /// SIC residual + CSI error leakage on `link` (no D2D term, no noise).
  double link_interference(const BeamformingSet& w, const QosLink& link) const;
  /// |h_{d,decoder}|^2
  double link_d2d_gain(const QosLink& link) const;

  double link_sinr(const BeamformingSet& w, double tau_bar, const QosLink& link) const;
  double d2d_sinr(const BeamformingSet& w, double tau_bar) const;
  /// log2(1 + SINR_D) / (tau_bar eta P_r + (1 + tau_bar) P_c), equal to R_D / E_c.
  double energy_efficiency(const BeamformingSet& w, double tau_bar) const;
  std::vector<double> margins(const BeamformingSet& w, double tau_bar) const;
  bool qos_feasible(const BeamformingSet& w, double tau_bar,
                    double tol = kQosTolerance) const;
  bool power_feasible(const BeamformingSet& w, double rel_tol = 1e-8) const;
  /// Full rates report through the link_physics formulas for this scheme.
  RatesReport rates(const BeamformingSet& w, const TimeSwitch& ts) const;

 private:
  ChannelSet channels_;
  SystemParams params_;
  Access access_;
  std::optional<CsiErrorRealization> error_;
  std::vector<QosLink> links_;
};

/// A scenario re-expressed in an orthonormal basis of span{h_k, h_dt, h_dr, eps_k}.
/// Beam components outside that span change no rate and only consume power, so optimizing
/// in the reduced coordinates (w = basis * c) loses nothing and shrinks the problem.
struct ReducedScenario {
  Scenario scenario;
  CMatrix basis;  // M x r, orthonormal columns

  BeamformingSet expand(const BeamformingSet& reduced) const;
  BeamformingSet project(const BeamformingSet& full) const;
};

/// Returns the identity basis when the span already fills all M antennas.
ReducedScenario reduce_to_signal_subspace(const Scenario& scenario);

}  // namespace eed2d
