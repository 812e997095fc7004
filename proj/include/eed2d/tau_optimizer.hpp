#pragma once

#include <limits>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "eed2d/link_physics.hpp"
#include "eed2d/scenario.hpp"

namespace eed2d {

/// One linear QoS constraint in tau_bar: slope * tau_bar + offset <= 0.
/// `scale` is the tau-free part of the SINR denominator, used to turn the SINR tolerance
/// into a tolerance on `offset`.
struct TauConstraint {
  int user = 0;
  int decoder = 0;
  double slope = 0.0;
  double offset = 0.0;
  double scale = 1.0;
};

/// Coefficients of the tau_bar subproblem for fixed beams:
///   max log2(1 + A tau_bar / (1 + L tau_bar)) / (B tau_bar + C)
///   s.t. tau_bar D_t + E_{k,t} <= 0 (k < t),  tau_bar F_k + G_k <= 0,  tau_bar >= 0.
/// L is the D2D self-interference caused by CSI error on h_dd (0 with perfect CSI).
struct TauSubproblemCoefficients {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double l = 0.0;
  double gamma = 0.0;                             // SINR threshold the offsets were built with
  std::vector<double> d;                          // indexed by decoder t
  std::map<std::pair<int, int>, double> e;        // keyed (k, t), k < t
  std::vector<double> f;                          // indexed by user k
  std::vector<double> g;                          // indexed by user k
  std::map<std::pair<int, int>, double> e_scale;  // tau-free denominators of the E terms
  std::vector<double> g_scale;                    // tau-free denominators of the G terms

  double numerator(double tau_bar) const;
  double denominator(double tau_bar) const { return b * tau_bar + c; }
  double ratio(double tau_bar) const { return numerator(tau_bar) / denominator(tau_bar); }
  std::vector<TauConstraint> constraints() const;
};

struct TauInterval {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
};

/// Full coefficients. Throws InvalidArgument when the scenario's SINR threshold is 0.
TauSubproblemCoefficients compute_tau_coefficients(const BeamformingSet& w,
                                                   const Scenario& scenario);
TauSubproblemCoefficients compute_tau_coefficients(const BeamformingSet& w,
                                                   const ChannelSet& channels,
                                                   const SystemParams& params);

/// Objective coefficients only (A, B, C, L); no constraints.
TauSubproblemCoefficients compute_tau_objective(const BeamformingSet& w, const Scenario& scenario);

/// [0, tau_bar_max]. Throws Infeasible if some constraint fails at every tau_bar >= 0.
/// Offsets within `sinr_tol` (expressed as an SINR slack) of zero count as satisfied.
TauInterval tau_feasible_interval(const TauSubproblemCoefficients& coeffs,
                                  double sinr_tol = kQosTolerance);

/// argmax over the interval of numerator(tau_bar) - q * denominator(tau_bar).
double dinkelbach_inner(const TauSubproblemCoefficients& coeffs, double q,
                        const TauInterval& interval);

struct DinkelbachOptions {
  double tol = 1e-8;
  int max_iterations = 100;
  /// Starting ratio; 0 by default. With q = 0 on an unbounded interval the first inner step
  /// has no finite maximizer, so the ratio at tau_bar = 1 is used instead.
  std::optional<double> q0;
};

struct DinkelbachResult {
  double tau_bar = 0.0;
  double q = 0.0;        // ratio at tau_bar
  double f_value = 0.0;  // F at the last q tested
  int iterations = 0;
  std::vector<double> q_trace;

  double tau() const { return tau_bar / (1.0 + tau_bar); }
};

/// Throws NonConvergence when |F(q)| stays above tol for max_iterations.
DinkelbachResult dinkelbach_solve(const TauSubproblemCoefficients& coeffs,
                                  const TauInterval& interval,
                                  const DinkelbachOptions& options = {});
DinkelbachResult dinkelbach_solve(const TauSubproblemCoefficients& coeffs,
                                  const DinkelbachOptions& options = {});

}  // namespace eed2d
