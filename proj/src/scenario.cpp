#include "eed2d/scenario.hpp"

#include <cmath>

#include "eed2d/errors.hpp"

namespace eed2d {

Scenario::Scenario(ChannelSet channels, SystemParams params, Access access,
                   std::optional<CsiErrorRealization> error)
    : channels_(std::move(channels)),
      params_(params),
      access_(access),
      error_(std::move(error)) {
  params_.validate();
  if (channels_.users() != params_.users || channels_.antennas() != params_.antennas)
    throw InvalidArgument("channel set dimensions differ from params (K, M)");
  if (error_ && static_cast<int>(error_->eps.size()) != channels_.users())
    throw InvalidArgument("CSI error realization does not match the channel set");
  const int k_users = users();
  for (int k = 0; k < k_users; ++k) {
    links_.push_back({k, k});
    if (access_ == Access::noma)
      for (int t = k + 1; t < k_users; ++t) links_.push_back({k, t});
  }
}

double Scenario::gamma() const {
  if (access_ == Access::oma) return std::exp2(users() * params_.r_min) - 1.0;
  return params_.gamma_min();
}

double Scenario::share() const { return access_ == Access::oma ? 1.0 / users() : 1.0; }

std::vector<int> Scenario::interferers(const QosLink& link) const {
  std::vector<int> out;
  if (access_ == Access::noma)
    for (int j = link.user + 1; j < users(); ++j) out.push_back(j);
  return out;
}

std::vector<int> Scenario::error_terms(const QosLink& link) const {
  std::vector<int> out;
  if (!error_) return out;
  if (access_ == Access::oma) {
    out.push_back(link.user);
  } else {
    for (int j = 0; j < users(); ++j) out.push_back(j);
  }
  return out;
}

double Scenario::harvested(const BeamformingSet& w) const {
  return share() * (w.w.adjoint() * channels_.h_dt).squaredNorm();
}

double Scenario::d2d_interference(const BeamformingSet& w) const {
  return share() * (w.w.adjoint() * channels_.h_dr).squaredNorm();
}

double Scenario::d2d_error_gain() const { return error_ ? std::norm(error_->eps_dd) : 0.0; }

cplx Scenario::link_amplitude(const BeamformingSet& w, const QosLink& link) const {
  return channels_.h[static_cast<std::size_t>(link.decoder)].dot(w.w.col(link.user));
}

double Scenario::link_interference(const BeamformingSet& w, const QosLink& link) const {
  const CVector& h_t = channels_.h[static_cast<std::size_t>(link.decoder)];
  double sum = 0.0;
  for (int j : interferers(link)) sum += std::norm(h_t.dot(w.w.col(j)));
  for (int j : error_terms(link))
    sum += std::norm(error_->eps[static_cast<std::size_t>(j)].dot(w.w.col(j)));
  return sum;
}

double Scenario::link_d2d_gain(const QosLink& link) const {
  return std::norm(channels_.h_dk[static_cast<std::size_t>(link.decoder)]);
}

double Scenario::link_sinr(const BeamformingSet& w, double tau_bar, const QosLink& link) const {
  const double p_t = params_.eta * tau_bar * harvested(w);
  return std::norm(link_amplitude(w, link)) /
         (p_t * link_d2d_gain(link) + link_interference(w, link) + params_.sigma2);
}

double Scenario::d2d_sinr(const BeamformingSet& w, double tau_bar) const {
  const double p_t = params_.eta * tau_bar * harvested(w);
  return p_t * std::norm(channels_.h_dd) /
         (d2d_interference(w) + p_t * d2d_error_gain() + params_.sigma2);
}

double Scenario::energy_efficiency(const BeamformingSet& w, double tau_bar) const {
  const double energy =
      tau_bar * params_.eta * harvested(w) + (1.0 + tau_bar) * params_.p_c;
  return std::log2(1.0 + d2d_sinr(w, tau_bar)) / energy;
}

std::vector<double> Scenario::margins(const BeamformingSet& w, double tau_bar) const {
  std::vector<double> out;
  out.reserve(links_.size());
  for (const QosLink& link : links_) out.push_back(link_sinr(w, tau_bar, link) - gamma());
  return out;
}

bool Scenario::qos_feasible(const BeamformingSet& w, double tau_bar, double tol) const {
  for (double m : margins(w, tau_bar))
    if (!(m >= -tol)) return false;
  return true;
}

bool Scenario::power_feasible(const BeamformingSet& w, double rel_tol) const {
  const double cap = params_.p_max * (1.0 + rel_tol);
  if (access_ == Access::oma) {
    for (int k = 0; k < w.users(); ++k)
      if (w.w.col(k).squaredNorm() > cap) return false;
    return true;
  }
  return w.total_power() <= cap;
}

RatesReport Scenario::rates(const BeamformingSet& w, const TimeSwitch& ts) const {
  if (access_ == Access::oma) return oma_rates(w, ts, channels_, params_, error());
  if (error_) return imperfect_rates(w, ts, channels_, *error_, params_);
  return stage_rates(w, ts, channels_, params_);
}

BeamformingSet ReducedScenario::expand(const BeamformingSet& reduced) const {
  return BeamformingSet(basis * reduced.w);
}

BeamformingSet ReducedScenario::project(const BeamformingSet& full) const {
  return BeamformingSet(basis.adjoint() * full.w);
}

ReducedScenario reduce_to_signal_subspace(const Scenario& scenario) {
  const ChannelSet& ch = scenario.channels();
  const int m = scenario.antennas();
  std::vector<const CVector*> span{&ch.h_dt, &ch.h_dr};
  for (const CVector& h : ch.h) span.push_back(&h);
  if (const CsiErrorRealization* err = scenario.error())
    for (const CVector& e : err->eps) span.push_back(&e);

  CMatrix basis = CMatrix::Identity(m, m);
  if (static_cast<int>(span.size()) < m) {
    CMatrix vectors(m, static_cast<Eigen::Index>(span.size()));
    for (std::size_t i = 0; i < span.size(); ++i)
      vectors.col(static_cast<Eigen::Index>(i)) = *span[i];
    Eigen::ColPivHouseholderQR<CMatrix> qr(vectors);
    qr.setThreshold(1e-12);
    const auto rank = std::max<Eigen::Index>(qr.rank(), 1);
    basis = CMatrix(qr.householderQ()).leftCols(rank);
  }
  if (basis.cols() == m) return {scenario, CMatrix::Identity(m, m)};

  ChannelSet reduced = ch;
  for (CVector& h : reduced.h) h = basis.adjoint() * h;
  reduced.h_dt = basis.adjoint() * ch.h_dt;
  reduced.h_dr = basis.adjoint() * ch.h_dr;
  std::optional<CsiErrorRealization> err;
  if (scenario.error()) {
    err = *scenario.error();
    for (CVector& e : err->eps) e = basis.adjoint() * e;
  }
  SystemParams params = scenario.params();
  params.antennas = static_cast<int>(basis.cols());
  return {Scenario(std::move(reduced), params, scenario.access(), std::move(err)),
          std::move(basis)};
}

}  // namespace eed2d
