#pragma once

#include <optional>
#include <vector>

#include "eed2d/beam_optimizer.hpp"
#include "eed2d/link_physics.hpp"
#include "eed2d/scenario.hpp"
#include "eed2d/tau_optimizer.hpp"

namespace eed2d {

enum class Algorithm { alt, exhaustive };

const char* to_string(Access access);
const char* to_string(Algorithm algorithm);

struct Solution {
  BeamformingSet w;
  TimeSwitch tau = TimeSwitch::from_tau(0.0);
  double ee = 0.0;
  RatesReport rates;
  std::vector<double> trace;  // true EE: initial point, then one entry per outer iteration
  int iterations = 0;
  bool converged = false;
  double initial_ee = 0.0;
  Access scheme = Access::noma;
  Algorithm algorithm = Algorithm::alt;
};

struct InitialPoint {
  BeamformingSet w;
  TimeSwitch tau = TimeSwitch::from_tau(0.0);
};

/// MRT directions with the smallest powers giving every link SINR >= boost * gamma at
/// tau_bar, then scaled up uniformly to just inside the power budget.
/// Returns nullopt when the budget cannot support those powers.
std::optional<BeamformingSet> initialize_at(const Scenario& scenario, double tau_bar,
                                            double boost = 1.1);

/// Tries tau = 0.5, 0.25, ... and finally tau = 0. Throws Infeasible when none works.
InitialPoint feasible_initialization(const Scenario& scenario);
InitialPoint feasible_initialization(const ChannelSet& channels, const SystemParams& params);

struct AlternatingOptions {
  double tol = 1e-5;  // relative EE change between outer iterations
  int max_outer = 30;
  SolverOptions solver;
  DinkelbachOptions dinkelbach;
  /// tau_bar is kept this fraction below the QoS limit so the next beam solve starts
  /// strictly inside the feasible set.
  double tau_margin = 1e-9;
  /// Optimize in the span of the channel vectors (exact, smaller problem).
  bool reduce = true;
};

/// Alternating beam (quadratic transform + barrier) and tau (Dinkelbach) ascent.
/// Returns the best iterate. Throws Infeasible when no feasible start exists.
Solution alternating_optimize(const Scenario& scenario, const AlternatingOptions& options = {});
Solution alternating_optimize(const ChannelSet& channels, const SystemParams& params,
                              const AlternatingOptions& options = {});

struct ExhaustiveOptions {
  double xi = 0.1;
  BeamSolveOptions beam;
  bool reduce = true;
  bool parallel = false;  // spread grid points over OpenMP threads
};

/// tau grid {0.001, 0.001 + xi, ...} up to 0.999.
std::vector<double> exhaustive_grid(double xi);

/// Beam optimization at every grid tau; best EE wins. Infeasible grid points are skipped.
/// Throws Infeasible when every grid point is infeasible.
Solution exhaustive_tau_optimize(const Scenario& scenario, const ExhaustiveOptions& options = {});
Solution exhaustive_tau_optimize(const ChannelSet& channels, const SystemParams& params,
                                 const ExhaustiveOptions& options = {});

/// Equal-share TDMA baseline optimized with the alternating algorithm.
Solution oma_baseline_optimize(const ChannelSet& channels, const SystemParams& params,
                               const AlternatingOptions& options = {},
                               const CsiErrorRealization* error = nullptr);

}  // namespace eed2d
