#pragma once

#include <cmath>

#include "eed2d/types.hpp"

namespace eed2d {

/// Scalar constants of one downlink + D2D scenario. Powers in watts, rates in bps/Hz.
struct SystemParams {
  int users = 4;
  int antennas = 10;
  double p_max = dbm_to_watt(20.0);
  double sigma2 = dbm_to_watt(-94.0);
  double eta = 0.1;
  double p_c = 1e-3;
  double r_min = 0.1;

  /// SINR threshold equivalent to `r_min`; always derived, never stored.
  double gamma_min() const { return std::exp2(r_min) - 1.0; }

  /// Throws InvalidArgument when any invariant is violated.
  void validate() const;
};

/// Path-loss exponents of the four link classes.
struct PathLoss {
  double bs_user = 2.5;   // BS -> downlink users
  double d2d = 2.0;       // Dt -> Dr
  double bs_device = 3.0; // BS -> Dt and BS -> Dr
  double dt_user = 3.0;   // Dt -> downlink users
};

}  // namespace eed2d
