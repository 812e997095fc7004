#pragma once

#include <memory>
#include <vector>

#include "eed2d/link_physics.hpp"
#include "eed2d/types.hpp"

namespace eed2d {

/// Twice-differentiable real function of a real vector.
class SmoothFunction {
 public:
  virtual ~SmoothFunction() = default;
  virtual double value(const RVector& x) const = 0;
  virtual RVector gradient(const RVector& x) const = 0;
  virtual RMatrix hessian(const RVector& x) const = 0;
  /// Points outside the domain are rejected by the line search.
  virtual bool in_domain(const RVector& /*x*/) const { return true; }
};

/// x^T Q x + b^T x + c with Q symmetric.
class Quadratic : public SmoothFunction {
 public:
  Quadratic(RMatrix q, RVector b, double c);

  double value(const RVector& x) const override;
  RVector gradient(const RVector& x) const override;
  RMatrix hessian(const RVector& x) const override;

  const RMatrix& q() const { return q_; }
  const RVector& b() const { return b_; }
  double c() const { return c_; }

 private:
  RMatrix q_;
  RVector b_;
  double c_;
};

/// maximize objective(x) subject to constraints[i](x) <= 0.
/// The objective must be concave and every constraint convex.
struct ConvexProgram {
  int dimension = 0;
  std::shared_ptr<const SmoothFunction> objective;
  std::vector<std::shared_ptr<const SmoothFunction>> constraints;
};

struct SolverOptions {
  double barrier_t0 = 1.0;
  double barrier_mu = 10.0;
  double newton_tol = 1e-8;  // on half the squared Newton decrement
  int max_newton = 50;       // per centering step
  double feas_tol = 1e-8;    // stop when m / t drops below this

  void validate() const;
};

struct BarrierResult {
  RVector x;
  double objective = 0.0;
  double t = 0.0;  // final barrier weight
  int outer_iterations = 0;
  int newton_iterations = 0;
  std::vector<double> objective_trace;  // after each centering step
};

/// Log-barrier interior-point method with damped Newton centering.
/// Throws NotStrictlyFeasible unless every constraint is < 0 at x0 (and x0 lies in the
/// objective's domain), and LineSearchStall when a Newton step makes no progress far from
/// the center.
BarrierResult barrier_solve(const ConvexProgram& program, const RVector& x0,
                            const SolverOptions& options = {});

/// barrier_solve, retried with barrier_mu <- sqrt(barrier_mu) after each LineSearchStall
/// while barrier_mu stays above 1.5. The last stall is rethrown.
BarrierResult barrier_solve_retrying(const ConvexProgram& program, const RVector& x0,
                                     SolverOptions options = {});

struct KktResidual {
  double residual = 0.0;       // || grad f - sum lambda_i grad g_i ||
  double gradient_norm = 0.0;  // || grad f ||
};

/// Stationarity residual with the barrier multipliers lambda_i = 1 / (-t g_i(x)).
KktResidual kkt_residual(const ConvexProgram& program, const RVector& x, double t);

/// [vec(Re W); vec(Im W)] with W stored M x K, so user k's real parts occupy
/// entries [kM, (k+1)M) and its imaginary parts [MK + kM, MK + (k+1)M).
RVector lift(const BeamformingSet& w);
BeamformingSet unlift(const RVector& x, int users, int antennas);

/// Real lifting of the Hermitian form w^H H w: returns the 2M x 2M block
/// [[Re H, -Im H], [Im H, Re H]] acting on [Re w; Im w].
RMatrix lift_hermitian(const CMatrix& h);

}  // namespace eed2d
