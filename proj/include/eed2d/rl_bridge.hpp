#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "eed2d/link_physics.hpp"
#include "eed2d/scenario.hpp"

namespace eed2d {

/// 4K + 3 + K(K-1)/2
std::size_t state_length(int users);
/// 1 + 2MK
std::size_t action_length(int users, int antennas);

struct NormalizedAction {
  BeamformingSet w;
  TimeSwitch tau = TimeSwitch::from_tau(0.0);
};

/// raw = [tau_raw, Re(w_1..w_K), Im(w_1..w_K)] (each block user-major).
/// Beams are rescaled to total power P_max; tau = sigmoid(tau_raw) clipped to [1e-3, 1 - 1e-3].
/// Throws AllZeroBeams when every beam entry is 0 and InvalidArgument on a length mismatch.
NormalizedAction normalize_action(const std::vector<double>& raw, const SystemParams& params);

/// R_D / E_c when every reduced QoS constraint holds, otherwise 0.
double compute_reward(const BeamformingSet& w, const TimeSwitch& ts, const Scenario& scenario);
double compute_reward(const BeamformingSet& w, const TimeSwitch& ts, const ChannelSet& channels,
                      const SystemParams& params);

/// [|h_k|^2, |h_Dt|^2, |h_Dr|^2, |h_dd|^2, |h_dk|^2, R_k, R_{k->t} ordered by (t, k), |w_k|^2].
/// Without `rates` (and `w`) the rate and beam entries are zero.
std::vector<double> env_state(const ChannelSet& channels, const RatesReport* rates,
                              const BeamformingSet* w);

enum class EnvMode { fixed, redraw };

struct BridgeOptions {
  SystemParams params;
  EnvMode mode = EnvMode::fixed;
  std::uint64_t seed = 1;
  /// Per-entry CSI error variance; the environment is imperfect when set.
  std::optional<double> sigma_eps2;
};

/// Line-delimited JSON session: reset / step / close. Returns when "close" arrives or the
/// input ends. Malformed requests get {"error": ..., "fatal": false} and the loop continues.
void serve(std::istream& in, std::ostream& out, const BridgeOptions& options);

}  // namespace eed2d
