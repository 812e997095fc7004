#pragma once

#include <map>
#include <utility>
#include <vector>

#include "eed2d/convex_solver.hpp"
#include "eed2d/scenario.hpp"

namespace eed2d {

/// Quadratic-transform auxiliaries for fixed (W, tau_bar).
struct AuxiliaryVars {
  double y = 0.0;
  std::vector<cplx> z;                      // one per user
  std::map<std::pair<int, int>, cplx> nu;   // keyed (t, k), t > k: user t decoding k
  std::vector<cplx> mu;                     // own-signal links

  cplx link(const QosLink& link) const;
};

/// Closed-form optimal auxiliaries at W:
///   z_k = a_k / D(W), y = sqrt(R(W)) / E(W), nu and mu = amplitude / SINR denominator,
/// with a_k = sqrt(share) h_Dt^H w_k and D(W) = P_i + tau_bar eta P_r |eps_dd|^2 + sigma^2.
AuxiliaryVars update_auxiliaries(const BeamformingSet& w, double tau_bar,
                                 const Scenario& scenario);
AuxiliaryVars update_auxiliaries(const BeamformingSet& w, double tau_bar,
                                 const ChannelSet& channels, const SystemParams& params);

/// f_qq = 2y sqrt(log2(1 + tau_bar eta |h_dd|^2 max(S, 0))) - y^2 E(W), where
/// S = sum_k [2 Re(conj(z_k) a_k) - |z_k|^2 D(W)].
double transformed_objective(const BeamformingSet& w, const AuxiliaryVars& aux, double tau_bar,
                             const Scenario& scenario);
double transformed_objective(const BeamformingSet& w, const AuxiliaryVars& aux, double tau_bar,
                             const ChannelSet& channels, const SystemParams& params);

/// Reformulated QoS value 2 Re(conj(lambda) h_t^H w_k) - |lambda|^2 alpha(W) - gamma per link,
/// in scenario.links() order. Equals the SINR margin at freshly updated auxiliaries.
std::vector<double> transformed_margins(const BeamformingSet& w, const AuxiliaryVars& aux,
                                        double tau_bar, const Scenario& scenario);

/// Concave surrogate program over lift(W). Constraints: one per QoS link (dropped when the
/// threshold is 0), then the power budget (one per beam for OMA).
ConvexProgram build_subproblem(const AuxiliaryVars& aux, double tau_bar,
                               const Scenario& scenario);
ConvexProgram build_subproblem(const AuxiliaryVars& aux, double tau_bar,
                               const ChannelSet& channels, const SystemParams& params);

struct BeamSolveOptions {
  double tol = 1e-6;  // relative EE gain per round
  int max_rounds = 50;
  SolverOptions solver;
};

struct BeamSolveResult {
  BeamformingSet w;
  std::vector<double> trace;  // EE (= f_qq at refreshed auxiliaries) at the start and per round
  int rounds = 0;
  bool stalled = false;  // a subproblem solve stalled even after retries; w is the last good round
};

/// Repeated {update_auxiliaries; barrier solve} for fixed tau_bar, warm-started at w_init.
/// Throws Infeasible when w_init is not strictly feasible.
BeamSolveResult solve_beams(const Scenario& scenario, double tau_bar,
                            const BeamformingSet& w_init, const BeamSolveOptions& options = {});

}  // namespace eed2d
