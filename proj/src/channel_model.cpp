#include "eed2d/channel_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "eed2d/errors.hpp"

namespace eed2d {

double distance(const Point& a, const Point& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

cplx complex_normal(Rng& rng) {
  std::normal_distribution<double> half(0.0, std::sqrt(0.5));
  const double re = half(rng);
  const double im = half(rng);
  return {re, im};
}

namespace {

double link_scale(const Point& a, const Point& b, double exponent) {
  const double d = distance(a, b);
  if (!(d > 0.0)) throw InvalidArgument("coincident nodes in topology");
  return 1.0 / std::sqrt(std::pow(d, exponent));
}

CVector rayleigh_vector(int m, double scale, Rng& rng) {
  CVector v(m);
  for (int i = 0; i < m; ++i) v(i) = complex_normal(rng) * scale;
  return v;
}

}  // namespace

Topology generate_topology(const SystemParams& params, Rng& rng) {
  if (params.users < 1) throw InvalidArgument("at least one downlink user is required");
  Topology topo;
  std::uniform_real_distribution<double> coord(3.0, 8.0);
  topo.users.reserve(static_cast<std::size_t>(params.users));
  for (int k = 0; k < params.users; ++k) {
    const double x = coord(rng);
    const double y = coord(rng);
    topo.users.push_back({x, y});
  }
  return topo;
}

ChannelSet draw_channels(const Topology& topology, const SystemParams& params, Rng& rng) {
  const int m = params.antennas;
  if (m < 1) throw InvalidArgument("at least one antenna is required");
  if (static_cast<int>(topology.users.size()) != params.users)
    throw InvalidArgument("topology user count differs from params.users");
  const PathLoss& pl = topology.pathloss;

  ChannelSet ch;
  for (const Point& u : topology.users)
    ch.h.push_back(rayleigh_vector(m, link_scale(topology.bs, u, pl.bs_user), rng));
  ch.h_dt = rayleigh_vector(m, link_scale(topology.bs, topology.dt, pl.bs_device), rng);
  ch.h_dr = rayleigh_vector(m, link_scale(topology.bs, topology.dr, pl.bs_device), rng);
  ch.h_dd = complex_normal(rng) * link_scale(topology.dt, topology.dr, pl.d2d);
  for (const Point& u : topology.users)
    ch.h_dk.push_back(complex_normal(rng) * link_scale(topology.dt, u, pl.dt_user));
  ch.order.resize(topology.users.size());
  std::iota(ch.order.begin(), ch.order.end(), 0);
  return sort_for_sic(std::move(ch));
}

ChannelSet sort_for_sic(ChannelSet channels) {
  const auto k = channels.h.size();
  if (channels.h_dk.size() != k) throw InvalidArgument("h_dk size differs from user count");
  if (channels.order.size() != k) {
    channels.order.resize(k);
    std::iota(channels.order.begin(), channels.order.end(), 0);
  }
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return channels.h[a].squaredNorm() < channels.h[b].squaredNorm();
  });
  ChannelSet sorted = channels;
  for (std::size_t i = 0; i < k; ++i) {
    sorted.h[i] = channels.h[idx[i]];
    sorted.h_dk[i] = channels.h_dk[idx[i]];
    sorted.order[i] = channels.order[idx[i]];
  }
  return sorted;
}

std::pair<ChannelSet, CsiErrorRealization> apply_csi_error(const ChannelSet& channels,
                                                           double variance, Rng& rng) {
  if (!(variance >= 0.0)) throw InvalidArgument("CSI error variance must be nonnegative");
  const double sd = std::sqrt(variance);
  CsiErrorRealization err;
  err.variance = variance;
  ChannelSet estimated = channels;
  for (int k = 0; k < channels.users(); ++k) {
    CVector e = rayleigh_vector(channels.antennas(), sd, rng);
    estimated.h[static_cast<std::size_t>(k)] += e;
    err.eps.push_back(std::move(e));
  }
  err.eps_dd = complex_normal(rng) * sd;
  estimated.h_dd += err.eps_dd;
  return {std::move(estimated), std::move(err)};
}

ChannelSet draw_trial_channels(const SystemParams& params, std::uint64_t seed) {
  Rng topo_rng = make_rng(seed, Stream::topology);
  Rng ch_rng = make_rng(seed, Stream::channels);
  return draw_channels(generate_topology(params, topo_rng), params, ch_rng);
}

}  // namespace eed2d
