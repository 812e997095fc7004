#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "eed2d/channel_model.hpp"
#include "eed2d/link_physics.hpp"
#include "oracles/oracles.hpp"

namespace testing_support {

using namespace eed2d;

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

inline CVector random_cvector(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale / std::sqrt(2.0));
  CVector v(n);
  for (int i = 0; i < n; ++i) v(i) = cplx(nd(rng), nd(rng));
  return v;
}

inline BeamformingSet random_beams(int k, int m, double power, std::mt19937_64& rng) {
  CMatrix w(m, k);
  for (int j = 0; j < k; ++j) w.col(j) = random_cvector(m, rng);
  w *= std::sqrt(power / w.squaredNorm());
  return BeamformingSet(w);
}

/// Synthetic SIC-sorted channels with unit-scale gains.
inline ChannelSet random_channels(int k, int m, std::mt19937_64& rng, double user_scale = 1.0) {
  ChannelSet c;
  for (int j = 0; j < k; ++j) c.h.push_back(random_cvector(m, rng, user_scale));
  c.h_dt = random_cvector(m, rng);
  c.h_dr = random_cvector(m, rng, 0.3);
  c.h_dd = random_cvector(1, rng)(0);
  for (int j = 0; j < k; ++j) c.h_dk.push_back(random_cvector(1, rng, 0.3)(0));
  for (int j = 0; j < k; ++j) c.order.push_back(j);
  return sort_for_sic(std::move(c));
}

inline oracle::cvec to_vec(const CVector& v) { return oracle::cvec(v.data(), v.data() + v.size()); }

inline std::vector<oracle::cvec> to_beams(const BeamformingSet& w) {
  std::vector<oracle::cvec> b;
  for (int k = 0; k < w.users(); ++k) b.push_back(to_vec(w.w.col(k)));
  return b;
}

inline oracle::Instance to_instance(const ChannelSet& c, const SystemParams& p,
                                    const CsiErrorRealization* err = nullptr) {
  oracle::Instance in;
  for (const auto& h : c.h) in.h.push_back(to_vec(h));
  in.h_dt = to_vec(c.h_dt);
  in.h_dr = to_vec(c.h_dr);
  in.h_dd = c.h_dd;
  in.h_dk = c.h_dk;
  if (err != nullptr) {
    for (const auto& e : err->eps) in.eps.push_back(to_vec(e));
    in.eps_dd = err->eps_dd;
  }
  in.sigma2 = p.sigma2;
  in.eta = p.eta;
  in.p_c = p.p_c;
  return in;
}

}  // namespace testing_support
