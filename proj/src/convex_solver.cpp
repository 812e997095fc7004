#include "eed2d/convex_solver.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

#include "eed2d/errors.hpp"

namespace eed2d {

Quadratic::Quadratic(RMatrix q, RVector b, double c)
    : q_(std::move(q)), b_(std::move(b)), c_(c) {
  if (q_.rows() != q_.cols() || q_.rows() != b_.size())
    throw InvalidArgument("quadratic dimensions disagree");
}

double Quadratic::value(const RVector& x) const { return x.dot(q_ * x) + b_.dot(x) + c_; }

RVector Quadratic::gradient(const RVector& x) const { return 2.0 * (q_ * x) + b_; }

RMatrix Quadratic::hessian(const RVector& /*x*/) const { return 2.0 * q_; }

void SolverOptions::validate() const {
  if (!(barrier_t0 > 0.0)) throw InvalidArgument("barrier_t0 must be > 0");
  if (!(barrier_mu > 1.0)) throw InvalidArgument("barrier_mu must be > 1");
  if (!(newton_tol > 0.0) || !(feas_tol > 0.0)) throw InvalidArgument("tolerances must be > 0");
  if (max_newton < 1) throw InvalidArgument("max_newton must be >= 1");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// phi(x) = -t f(x) - sum log(-g_i(x)); +inf outside the strict interior.
// Callers fold the objective scale into t.
double barrier_value(const ConvexProgram& p, const RVector& x, double t) {
  if (!p.objective->in_domain(x)) return kInf;
  double sum = 0.0;
  for (const auto& g : p.constraints) {
    const double v = g->value(x);
    if (!(v < 0.0)) return kInf;
    sum -= std::log(-v);
  }
  return -t * p.objective->value(x) + sum;
}

struct Step {
  RVector dx;
  RVector grad;
  double decrement2 = 0.0;
};

Step newton_step(const ConvexProgram& p, const RVector& x, double t) {
  RVector grad = -t * p.objective->gradient(x);
  RMatrix hess = -t * p.objective->hessian(x);
  for (const auto& g : p.constraints) {
    const double v = g->value(x);
    const RVector dg = g->gradient(x);
    grad += dg / -v;
    hess += g->hessian(x) / -v;
    hess.noalias() += (dg * dg.transpose()) / (v * v);
  }
  Eigen::LLT<RMatrix> llt(hess);
  RVector dx;
  if (llt.info() == Eigen::Success) {
    dx = -llt.solve(grad);
  } else {
    const double diag = std::max(1.0, hess.diagonal().cwiseAbs().maxCoeff());
    double reg = 1e-10 * diag;
    for (;;) {
      RMatrix shifted = hess;
      shifted.diagonal().array() += reg;
      llt.compute(shifted);
      if (llt.info() == Eigen::Success) break;
      reg *= 10.0;
      if (!std::isfinite(reg)) throw LineSearchStall("Newton system cannot be regularized");
    }
    dx = -llt.solve(grad);
  }
  const double dec2 = -grad.dot(dx);
  return {std::move(dx), std::move(grad), dec2};
}

// Returns the number of Newton iterations used.
int center(const ConvexProgram& p, RVector& x, double t, const SolverOptions& opt) {
  double phi = barrier_value(p, x, t);
  for (int it = 1; it <= opt.max_newton; ++it) {
    Step step = newton_step(p, x, t);
    if (!(step.decrement2 / 2.0 > opt.newton_tol)) return it;
    double s = 1.0;
    RVector trial = x + step.dx;
    double phi_trial = barrier_value(p, trial, t);
    const double slack = 10.0 * std::numeric_limits<double>::epsilon() * std::abs(phi);
    while (!(phi_trial <= phi - 0.25 * s * step.decrement2 + slack)) {
      s *= 0.5;
      if (s < 1e-20) {
        if (step.decrement2 / 2.0 < 1e-3) return it;
        throw LineSearchStall("backtracking failed to decrease the barrier function");
      }
      trial = x + s * step.dx;
      phi_trial = barrier_value(p, trial, t);
    }
    x = std::move(trial);
    const double progress = phi - phi_trial;
    phi = phi_trial;
    if (progress <= 8.0 * std::numeric_limits<double>::epsilon() * std::abs(phi)) return it;
  }
  return opt.max_newton;
}

}  // namespace

BarrierResult barrier_solve(const ConvexProgram& program, const RVector& x0,
                            const SolverOptions& options) {
  options.validate();
  if (!program.objective) throw InvalidArgument("program has no objective");
  if (x0.size() != program.dimension) throw InvalidArgument("x0 has the wrong dimension");
  if (!std::isfinite(barrier_value(program, x0, options.barrier_t0)))
    throw NotStrictlyFeasible("start point is not strictly inside the feasible set");

  BarrierResult out;
  out.x = x0;
  const auto m = static_cast<double>(program.constraints.size());
  // Objective measured in units of |f(x0)|, so the gap m / t is relative.
  const double f0 = std::abs(program.objective->value(x0));
  const double unit = f0 > 0.0 ? f0 : 1.0;
  double t = options.barrier_t0;
  for (;;) {
    out.newton_iterations += center(program, out.x, t / unit, options);
    ++out.outer_iterations;
    out.objective_trace.push_back(program.objective->value(out.x));
    if (m / t < options.feas_tol) break;
    t *= options.barrier_mu;
  }
  out.t = t / unit;
  out.objective = out.objective_trace.back();
  return out;
}

BarrierResult barrier_solve_retrying(const ConvexProgram& program, const RVector& x0,
                                     SolverOptions options) {
  for (;;) {
    try {
      return barrier_solve(program, x0, options);
    } catch (const LineSearchStall&) {
      const double mu = std::sqrt(options.barrier_mu);
      if (!(mu > 1.5)) throw;
      options.barrier_mu = mu;
    }
  }
}

KktResidual kkt_residual(const ConvexProgram& program, const RVector& x, double t) {
  const RVector df = program.objective->gradient(x);
  RVector r = df;
  for (const auto& g : program.constraints) {
    const double lambda = 1.0 / (-t * g->value(x));
    r -= lambda * g->gradient(x);
  }
  return {r.norm(), df.norm()};
}

RVector lift(const BeamformingSet& w) {
  const Eigen::Index n = w.w.size();
  RVector x(2 * n);
  x.head(n) = w.w.real().reshaped();
  x.tail(n) = w.w.imag().reshaped();
  return x;
}

BeamformingSet unlift(const RVector& x, int users, int antennas) {
  const Eigen::Index n = static_cast<Eigen::Index>(users) * antennas;
  if (users < 0 || antennas < 0 || x.size() != 2 * n)
    throw InvalidArgument("lifted vector length is not 2 M K");
  CMatrix w(antennas, users);
  w.real() = x.head(n).reshaped(antennas, users);
  w.imag() = x.tail(n).reshaped(antennas, users);
  return BeamformingSet(std::move(w));
}

RMatrix lift_hermitian(const CMatrix& h) {
  const Eigen::Index m = h.rows();
  RMatrix out(2 * m, 2 * m);
  out.topLeftCorner(m, m) = h.real();
  out.topRightCorner(m, m) = -h.imag();
  out.bottomLeftCorner(m, m) = h.imag();
  out.bottomRightCorner(m, m) = h.real();
  return out;
}

}  // namespace eed2d
