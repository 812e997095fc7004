#include "eed2d/beam_optimizer.hpp"

#include <cmath>

#include "eed2d/errors.hpp"

namespace eed2d {

cplx AuxiliaryVars::link(const QosLink& l) const {
  if (l.user == l.decoder) return mu.at(static_cast<std::size_t>(l.user));
  return nu.at({l.decoder, l.user});
}

namespace {

struct Components {
  double p_r = 0.0;
  double denom = 0.0;   // D(W)
  double energy = 0.0;  // E(W)
  double gain = 0.0;    // tau_bar eta |h_dd|^2
};

Components components(const BeamformingSet& w, double tau_bar, const Scenario& s) {
  const SystemParams& p = s.params();
  Components c;
  c.p_r = s.harvested(w);
  c.denom = s.d2d_interference(w) + tau_bar * p.eta * c.p_r * s.d2d_error_gain() + p.sigma2;
  c.energy = tau_bar * p.eta * c.p_r + (1.0 + tau_bar) * p.p_c;
  c.gain = tau_bar * p.eta * std::norm(s.channels().h_dd);
  return c;
}

cplx harvest_amplitude(const BeamformingSet& w, int k, const Scenario& s) {
  return std::sqrt(s.share()) * s.channels().h_dt.dot(w.w.col(k));
}

double link_alpha(const BeamformingSet& w, double tau_bar, const QosLink& link,
                  const Scenario& s) {
  const SystemParams& p = s.params();
  return tau_bar * p.eta * s.harvested(w) * s.link_d2d_gain(link) +
         s.link_interference(w, link) + p.sigma2;
}

// Lifted index helpers for the user-major layout of lift().
struct Layout {
  int users;
  int antennas;
  Eigen::Index n() const { return 2 * static_cast<Eigen::Index>(users) * antennas; }
  Eigen::Index re(int k) const { return static_cast<Eigen::Index>(k) * antennas; }
  Eigen::Index im(int k) const {
    return static_cast<Eigen::Index>(users) * antennas + re(k);
  }
};

// q += scale * lift(g g^H) on user k's coordinates.
void add_rank_one(RMatrix& q, const Layout& lay, int k, const CVector& g, double scale) {
  const Eigen::Index m = lay.antennas;
  const RVector gr = g.real();
  const RVector gi = g.imag();
  // g g^H = (gr gr^T + gi gi^T) + i (gi gr^T - gr gi^T)
  const RMatrix re = gr * gr.transpose() + gi * gi.transpose();
  const RMatrix im = gi * gr.transpose() - gr * gi.transpose();
  q.block(lay.re(k), lay.re(k), m, m) += scale * re;
  q.block(lay.re(k), lay.im(k), m, m) -= scale * im;
  q.block(lay.im(k), lay.re(k), m, m) += scale * im;
  q.block(lay.im(k), lay.im(k), m, m) += scale * re;
}

// b += scale * coefficients of Re(v^H w_k) on user k's coordinates.
void add_linear(RVector& b, const Layout& lay, int k, const CVector& v, double scale) {
  const Eigen::Index m = lay.antennas;
  b.segment(lay.re(k), m) += scale * v.real();
  b.segment(lay.im(k), m) += scale * v.imag();
}

class TransformedObjective : public SmoothFunction {
 public:
  TransformedObjective(double y, double gain, Quadratic s, Quadratic e)
      : y_(y), gain_(gain), s_(std::move(s)), e_(std::move(e)) {}

  double value(const RVector& x) const override {
    const double s = s_.value(x);
    const double rate = (gain_ > 0.0 && s > 0.0) ? std::log2(1.0 + gain_ * s) : 0.0;
    return 2.0 * y_ * std::sqrt(rate) - y_ * y_ * e_.value(x);
  }

  RVector gradient(const RVector& x) const override {
    RVector g = -y_ * y_ * e_.gradient(x);
    if (active(x)) g += 2.0 * y_ * first(s_.value(x)) * s_.gradient(x);
    return g;
  }

  RMatrix hessian(const RVector& x) const override {
    RMatrix h = -y_ * y_ * e_.hessian(x);
    if (active(x)) {
      const double s = s_.value(x);
      const RVector ds = s_.gradient(x);
      h += 2.0 * y_ * (second(s) * (ds * ds.transpose()) + first(s) * s_.hessian(x));
    }
    return h;
  }

  bool in_domain(const RVector& x) const override {
    return y_ == 0.0 || gain_ == 0.0 || s_.value(x) > 0.0;
  }

 private:
  bool active(const RVector& x) const {
    return y_ != 0.0 && gain_ > 0.0 && s_.value(x) > 0.0;
  }
  // d/ds sqrt(log2(1 + g s)) and its second derivative.
  double first(double s) const {
    const double lp = gain_ / ((1.0 + gain_ * s) * std::log(2.0));
    return lp / (2.0 * std::sqrt(std::log2(1.0 + gain_ * s)));
  }
  double second(double s) const {
    const double l = std::log2(1.0 + gain_ * s);
    const double lp = gain_ / ((1.0 + gain_ * s) * std::log(2.0));
    const double lpp = -gain_ * gain_ / ((1.0 + gain_ * s) * (1.0 + gain_ * s) * std::log(2.0));
    return lpp / (2.0 * std::sqrt(l)) - lp * lp / (4.0 * l * std::sqrt(l));
  }

  double y_;
  double gain_;
  Quadratic s_;
  Quadratic e_;
};

}  // namespace

AuxiliaryVars update_auxiliaries(const BeamformingSet& w, double tau_bar,
                                 const Scenario& scenario) {
  const Components c = components(w, tau_bar, scenario);
  AuxiliaryVars aux;
  for (int k = 0; k < scenario.users(); ++k)
    aux.z.push_back(harvest_amplitude(w, k, scenario) / c.denom);
  aux.y = std::sqrt(std::log2(1.0 + c.gain * c.p_r / c.denom)) / c.energy;
  aux.mu.assign(static_cast<std::size_t>(scenario.users()), cplx{0.0, 0.0});
  for (const QosLink& link : scenario.links()) {
    const cplx v = scenario.link_amplitude(w, link) / link_alpha(w, tau_bar, link, scenario);
    if (link.user == link.decoder)
      aux.mu[static_cast<std::size_t>(link.user)] = v;
    else
      aux.nu[{link.decoder, link.user}] = v;
  }
  return aux;
}

AuxiliaryVars update_auxiliaries(const BeamformingSet& w, double tau_bar,
                                 const ChannelSet& channels, const SystemParams& params) {
  return update_auxiliaries(w, tau_bar, Scenario(channels, params));
}

double transformed_objective(const BeamformingSet& w, const AuxiliaryVars& aux, double tau_bar,
                             const Scenario& scenario) {
  const Components c = components(w, tau_bar, scenario);
  double s = 0.0;
  for (int k = 0; k < scenario.users(); ++k) {
    const cplx zk = aux.z.at(static_cast<std::size_t>(k));
    s += 2.0 * std::real(std::conj(zk) * harvest_amplitude(w, k, scenario)) -
         std::norm(zk) * c.denom;
  }
  const double rate = s > 0.0 ? std::log2(1.0 + c.gain * s) : 0.0;
  return 2.0 * aux.y * std::sqrt(rate) - aux.y * aux.y * c.energy;
}

double transformed_objective(const BeamformingSet& w, const AuxiliaryVars& aux, double tau_bar,
                             const ChannelSet& channels, const SystemParams& params) {
  return transformed_objective(w, aux, tau_bar, Scenario(channels, params));
}

std::vector<double> transformed_margins(const BeamformingSet& w, const AuxiliaryVars& aux,
                                        double tau_bar, const Scenario& scenario) {
  std::vector<double> out;
  for (const QosLink& link : scenario.links()) {
    const cplx lambda = aux.link(link);
    out.push_back(2.0 * std::real(std::conj(lambda) * scenario.link_amplitude(w, link)) -
                  std::norm(lambda) * link_alpha(w, tau_bar, link, scenario) -
                  scenario.gamma());
  }
  return out;
}

ConvexProgram build_subproblem(const AuxiliaryVars& aux, double tau_bar,
                               const Scenario& scenario) {
  const SystemParams& p = scenario.params();
  const ChannelSet& ch = scenario.channels();
  const Layout lay{scenario.users(), scenario.antennas()};
  const Eigen::Index n = lay.n();
  const double share = scenario.share();

  RMatrix q_pr = RMatrix::Zero(n, n);
  RMatrix q_pi = RMatrix::Zero(n, n);
  for (int k = 0; k < lay.users; ++k) {
    add_rank_one(q_pr, lay, k, ch.h_dt, share);
    add_rank_one(q_pi, lay, k, ch.h_dr, share);
  }

  double z_energy = 0.0;
  RVector b_s = RVector::Zero(n);
  for (int k = 0; k < lay.users; ++k) {
    const cplx zk = aux.z.at(static_cast<std::size_t>(k));
    z_energy += std::norm(zk);
    add_linear(b_s, lay, k, ch.h_dt * zk, 2.0 * std::sqrt(share));
  }
  const RMatrix q_d = q_pi + tau_bar * p.eta * scenario.d2d_error_gain() * q_pr;
  Quadratic s(-z_energy * q_d, std::move(b_s), -z_energy * p.sigma2);
  Quadratic e(tau_bar * p.eta * q_pr, RVector::Zero(n), (1.0 + tau_bar) * p.p_c);

  ConvexProgram out;
  out.dimension = static_cast<int>(n);
  out.objective = std::make_shared<TransformedObjective>(
      aux.y, tau_bar * p.eta * std::norm(ch.h_dd), std::move(s), std::move(e));

  if (scenario.qos_active()) {
    for (const QosLink& link : scenario.links()) {
      const cplx lambda = aux.link(link);
      const double l2 = std::norm(lambda);
      const CVector& h_t = ch.h[static_cast<std::size_t>(link.decoder)];
      RMatrix q = tau_bar * p.eta * scenario.link_d2d_gain(link) * l2 * q_pr;
      for (int j : scenario.interferers(link)) add_rank_one(q, lay, j, h_t, l2);
      for (int j : scenario.error_terms(link))
        add_rank_one(q, lay, j, scenario.error()->eps[static_cast<std::size_t>(j)], l2);
      RVector b = RVector::Zero(n);
      add_linear(b, lay, link.user, h_t * lambda, -2.0);
      out.constraints.push_back(
          std::make_shared<Quadratic>(std::move(q), std::move(b), scenario.gamma() + l2 * p.sigma2));
    }
  }

  if (scenario.access() == Access::oma) {
    for (int k = 0; k < lay.users; ++k) {
      RMatrix q = RMatrix::Zero(n, n);
      q.diagonal().segment(lay.re(k), lay.antennas).setOnes();
      q.diagonal().segment(lay.im(k), lay.antennas).setOnes();
      out.constraints.push_back(std::make_shared<Quadratic>(std::move(q), RVector::Zero(n), -p.p_max));
    }
  } else {
    out.constraints.push_back(
        std::make_shared<Quadratic>(RMatrix::Identity(n, n), RVector::Zero(n), -p.p_max));
  }
  return out;
}

ConvexProgram build_subproblem(const AuxiliaryVars& aux, double tau_bar,
                               const ChannelSet& channels, const SystemParams& params) {
  return build_subproblem(aux, tau_bar, Scenario(channels, params));
}

BeamSolveResult solve_beams(const Scenario& scenario, double tau_bar,
                            const BeamformingSet& w_init, const BeamSolveOptions& options) {
  if (scenario.qos_active()) {
    for (double m : scenario.margins(w_init, tau_bar))
      if (!(m > 0.0)) throw Infeasible("initial beams do not strictly satisfy QoS");
  }
  if (!scenario.power_feasible(w_init, -1e-15))
    throw Infeasible("initial beams are not strictly inside the power budget");

  BeamSolveResult out;
  out.w = w_init;
  double ee = scenario.energy_efficiency(out.w, tau_bar);
  out.trace.push_back(ee);
  for (int round = 1; round <= options.max_rounds; ++round) {
    out.rounds = round;
    const AuxiliaryVars aux = update_auxiliaries(out.w, tau_bar, scenario);
    const ConvexProgram program = build_subproblem(aux, tau_bar, scenario);
    BarrierResult res;
    try {
      res = barrier_solve_retrying(program, lift(out.w), options.solver);
    } catch (const LineSearchStall&) {
      out.stalled = true;
      break;
    }
    BeamformingSet next = unlift(res.x, scenario.users(), scenario.antennas());
    const double ee_next = scenario.energy_efficiency(next, tau_bar);
    if (!(ee_next >= ee)) break;
    const double gain = (ee_next - ee) / std::max(std::abs(ee), 1e-300);
    out.w = std::move(next);
    ee = ee_next;
    out.trace.push_back(ee);
    if (gain < options.tol) break;
  }
  return out;
}

}  // namespace eed2d
