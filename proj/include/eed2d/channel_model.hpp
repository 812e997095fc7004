#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "eed2d/params.hpp"
#include "eed2d/rng.hpp"
#include "eed2d/types.hpp"

namespace eed2d {

using Point = std::array<double, 2>;

double distance(const Point& a, const Point& b);

struct Topology {
  Point bs{0.0, 0.0};
  Point dt{0.0, 9.0};
  Point dr{0.0, 10.0};
  std::vector<Point> users;
  PathLoss pathloss;
};

/// Every channel coefficient of the network, with users in SIC order
/// (nondecreasing squared norm of `h`, so index 0 is the weakest user).
struct ChannelSet {
  std::vector<CVector> h;  // BS -> user k
  CVector h_dt;            // BS -> D2D transmitter
  CVector h_dr;            // BS -> D2D receiver
  cplx h_dd{0.0, 0.0};     // Dt -> Dr
  std::vector<cplx> h_dk;  // Dt -> user k
  std::vector<int> order;  // order[k] = index of sorted user k in the drawing order

  int users() const { return static_cast<int>(h.size()); }
  int antennas() const { return static_cast<int>(h_dt.size()); }
};

struct CsiErrorRealization {
  std::vector<CVector> eps;  // error on h_k
  cplx eps_dd{0.0, 0.0};     // error on h_dd
  double variance = 0.0;
};

/// BS at the origin, Dt at (0, 9), Dr at (0, 10), users uniform in [3, 8]^2.
Topology generate_topology(const SystemParams& params, Rng& rng);

/// Rayleigh fading with unit per-entry variance, scaled by 1/sqrt(d^alpha), then SIC-sorted.
ChannelSet draw_channels(const Topology& topology, const SystemParams& params, Rng& rng);

/// Stable reorder of users by ||h_k||^2 (ties keep their current relative order).
ChannelSet sort_for_sic(ChannelSet channels);

/// Adds zero-mean circular Gaussian errors of per-entry variance `variance` to h_k and h_dd.
std::pair<ChannelSet, CsiErrorRealization> apply_csi_error(const ChannelSet& channels,
                                                           double variance, Rng& rng);

/// Circularly-symmetric complex normal with E|x|^2 = 1.
cplx complex_normal(Rng& rng);

/// Topology and channels of one Monte Carlo trial, drawn from dedicated streams of `seed`.
ChannelSet draw_trial_channels(const SystemParams& params, std::uint64_t seed);

}  // namespace eed2d
