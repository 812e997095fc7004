#include <cmath>
#include <random>

#include "doctest.h"
#include "eed2d/algorithms.hpp"
#include "eed2d/beam_optimizer.hpp"
#include "eed2d/errors.hpp"
#include "oracles/oracles.hpp"
#include "support.hpp"

using namespace eed2d;
using testing_support::rel_err;

namespace {

ChannelSet scalar_channels(cplx h, cplx h_dt, cplx h_dr, cplx h_dd, cplx h_dk) {
  ChannelSet c;
  c.h = {CVector::Constant(1, h)};
  c.h_dt = CVector::Constant(1, h_dt);
  c.h_dr = CVector::Constant(1, h_dr);
  c.h_dd = h_dd;
  c.h_dk = {h_dk};
  c.order = {0};
  return c;
}

Scenario default_scenario(std::uint64_t seed, Access a = Access::noma) {
  SystemParams p;
  return Scenario(draw_trial_channels(p, seed), p, a);
}

}  // namespace

TEST_CASE("auxiliary update scalar examples") {
  SystemParams p;
  p.users = 1;
  p.antennas = 1;
  p.sigma2 = 2.0;
  p.eta = 1.0;
  p.p_c = 0.5;
  p.p_max = 10.0;
  const Scenario s(scalar_channels(1.0, 1.0, 0.0, std::sqrt(2.0), 0.0), p);
  const BeamformingSet w(CMatrix::Constant(1, 1, 1.0));
  const AuxiliaryVars aux = update_auxiliaries(w, 1.0, s);
  CHECK(std::abs(aux.z[0] - cplx(0.5)) < 1e-15);
  CHECK(aux.y == doctest::Approx(0.5).epsilon(1e-14));

  // 2 Re(z* a) - |z|^2 D = |a|^2 / D at z = a / D
  const cplx a(1.0, 0.0);
  const double d = 2.0;
  const cplx z = a / d;
  CHECK(2.0 * std::real(std::conj(z) * a) - std::norm(z) * d == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(transformed_objective(w, aux, 1.0, s) - s.energy_efficiency(w, 1.0)) < 1e-14);
}

TEST_CASE("transformed objective equals EE at fresh auxiliaries") {
  std::mt19937_64 rng(100);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    const Scenario s = default_scenario(static_cast<std::uint64_t>(rep), rep % 3 == 2 ? Access::oma : Access::noma);
    const BeamformingSet w = testing_support::random_beams(4, 10, 0.1 * u(rng) + 1e-4, rng);
    const double tb = 5.0 * u(rng) + 1e-3;
    const AuxiliaryVars aux = update_auxiliaries(w, tb, s);
    CHECK(rel_err(transformed_objective(w, aux, tb, s), s.energy_efficiency(w, tb)) < 1e-10);
    const auto mt = transformed_margins(w, aux, tb, s);
    const auto mo = s.margins(w, tb);
    REQUIRE(mt.size() == mo.size());
    for (std::size_t i = 0; i < mt.size(); ++i)
      CHECK(std::abs(mt[i] - mo[i]) <= 1e-9 * (1.0 + std::abs(mo[i])));
  }
}

TEST_CASE("equivalence holds with CSI error") {
  SystemParams p;
  std::mt19937_64 rng(5);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng er(seed);
    auto [est, err] = apply_csi_error(draw_trial_channels(p, seed), 1e-3, er);
    const Scenario s(est, p, Access::noma, err);
    const BeamformingSet w = testing_support::random_beams(4, 10, 0.05, rng);
    const AuxiliaryVars aux = update_auxiliaries(w, 0.7, s);
    CHECK(rel_err(transformed_objective(w, aux, 0.7, s), s.energy_efficiency(w, 0.7)) < 1e-10);
    const auto mt = transformed_margins(w, aux, 0.7, s);
    const auto mo = s.margins(w, 0.7);
    for (std::size_t i = 0; i < mt.size(); ++i)
      CHECK(std::abs(mt[i] - mo[i]) <= 1e-9 * (1.0 + std::abs(mo[i])));
  }
}

TEST_CASE("zero beams and perturbed auxiliaries lower the surrogate") {
  const Scenario s = default_scenario(3);
  std::mt19937_64 rng(6);
  const BeamformingSet w = testing_support::random_beams(4, 10, 0.1, rng);
  const double tb = 0.8;
  AuxiliaryVars aux = update_auxiliaries(w, tb, s);
  const double p_c = s.params().p_c;
  CHECK(rel_err(transformed_objective(BeamformingSet::zeros(4, 10), aux, tb, s),
                -aux.y * aux.y * (1 + tb) * p_c) < 1e-14);
  const double ee = s.energy_efficiency(w, tb);
  std::normal_distribution<double> nd(0.0, 0.3);
  for (int rep = 0; rep < 200; ++rep) {
    AuxiliaryVars pert = aux;
    pert.y *= std::exp(nd(rng));
    for (cplx& z : pert.z) z *= cplx(std::exp(nd(rng)), nd(rng));
    CHECK(transformed_objective(w, pert, tb, s) <= ee * (1 + 1e-12));
  }
}

TEST_CASE("analytic gradient matches central differences") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    const Scenario s = default_scenario(static_cast<std::uint64_t>(100 + rep));
    const BeamformingSet w0 = testing_support::random_beams(4, 10, 0.1 * (0.2 + 0.8 * u(rng)), rng);
    const double tb = 0.1 + 3.0 * u(rng);
    const AuxiliaryVars aux = update_auxiliaries(w0, tb, s);
    const ConvexProgram prog = build_subproblem(aux, tb, s);
    const BeamformingSet w = testing_support::random_beams(4, 10, 0.1 * u(rng) + 1e-3, rng);
    const RVector x = lift(w);
    const RVector g = prog.objective->gradient(x);
    const auto fd = oracle::central_gradient(
        [&](const std::vector<double>& v) {
          return prog.objective->value(Eigen::Map<const RVector>(v.data(), static_cast<Eigen::Index>(v.size())));
        },
        std::vector<double>(x.data(), x.data() + x.size()));
    const RVector fdv = Eigen::Map<const RVector>(fd.data(), static_cast<Eigen::Index>(fd.size()));
    CHECK((g - fdv).norm() <= 1e-4 * g.norm());
    CHECK(rel_err(prog.objective->value(x), transformed_objective(w, aux, tb, s)) < 1e-10);
  }
}

TEST_CASE("analytic Hessian matches differences of the gradient") {
  const Scenario s = default_scenario(9);
  std::mt19937_64 rng(78);
  const BeamformingSet w = testing_support::random_beams(4, 10, 0.08, rng);
  const AuxiliaryVars aux = update_auxiliaries(w, 1.2, s);
  const ConvexProgram prog = build_subproblem(aux, 1.2, s);
  const RVector x = lift(w);
  const RMatrix h = prog.objective->hessian(x);
  RMatrix fd(x.size(), x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    RVector xp = x, xm = x;
    xp(i) += 1e-6;
    xm(i) -= 1e-6;
    fd.col(i) = (prog.objective->gradient(xp) - prog.objective->gradient(xm)) / 2e-6;
  }
  CHECK((h - fd).norm() <= 1e-4 * h.norm());
  CHECK((h - h.transpose()).norm() <= 1e-12 * h.norm());
  CHECK(Eigen::SelfAdjointEigenSolver<RMatrix>(h).eigenvalues().maxCoeff() <= 1e-8 * h.norm());
}

TEST_CASE("constraint counts") {
  SystemParams p1;
  p1.users = 1;
  p1.antennas = 2;
  const Scenario s1(draw_trial_channels(p1, 1), p1);
  std::mt19937_64 rng(1);
  const BeamformingSet w1 = testing_support::random_beams(1, 2, 0.05, rng);
  CHECK(build_subproblem(update_auxiliaries(w1, 1.0, s1), 1.0, s1).constraints.size() == 2);

  const Scenario s4 = default_scenario(1);
  const BeamformingSet w4 = testing_support::random_beams(4, 10, 0.05, rng);
  const ConvexProgram p4 = build_subproblem(update_auxiliaries(w4, 1.0, s4), 1.0, s4);
  CHECK(p4.constraints.size() == 11);
  CHECK(p4.dimension == 80);

  const Scenario so = default_scenario(1, Access::oma);
  CHECK(build_subproblem(update_auxiliaries(w4, 1.0, so), 1.0, so).constraints.size() == 8);

  SystemParams p0;
  p0.r_min = 0.0;
  const Scenario s0(draw_trial_channels(p0, 1), p0);
  CHECK(build_subproblem(update_auxiliaries(w4, 1.0, s0), 1.0, s0).constraints.size() == 1);
}

TEST_CASE("built constraints agree with the QoS margins at the update point") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Scenario s = default_scenario(seed);
    const InitialPoint init = feasible_initialization(s);
    const double tb = init.tau.tau_bar();
    const ConvexProgram prog = build_subproblem(update_auxiliaries(init.w, tb, s), tb, s);
    const RVector x = lift(init.w);
    const auto margins = s.margins(init.w, tb);
    for (std::size_t i = 0; i < margins.size(); ++i) {
      CHECK(margins[i] > 0.0);
      const double g = prog.constraints[i]->value(x);
      CHECK(g < 0.0);
      CHECK(std::abs(-g - margins[i]) <= 1e-9 * (1.0 + margins[i]));
    }
    CHECK(prog.constraints.back()->value(x) < 0.0);
  }
}

TEST_CASE("single antenna single user beam solve matches a power sweep") {
  SystemParams p;
  p.users = 1;
  p.antennas = 1;
  p.r_min = 0.0;
  p.sigma2 = 1e-3;
  p.p_c = 1e-3;
  p.p_max = 0.1;
  p.eta = 0.5;
  for (double hdr : {0.0, 0.05, 0.3}) {
    const Scenario s(scalar_channels(1.0, cplx(0.6, 0.2), hdr, cplx(0.9, -0.3), 0.2), p);
    const double tb = 1.0;
    const BeamformingSet w0(CMatrix::Constant(1, 1, cplx(0.01, 0.01)));
    const BeamSolveResult r = solve_beams(s, tb, w0);
    auto ee_at = [&](double pw) {
      return s.energy_efficiency(BeamformingSet(CMatrix::Constant(1, 1, std::sqrt(pw))), tb);
    };
    const double best_p = oracle::scan_max(ee_at, 0.0, p.p_max, 20000);
    CHECK(r.trace.back() >= ee_at(best_p) * (1 - 1e-6));
    CHECK(std::abs(r.w.total_power() - best_p) <= 1e-3 * p.p_max);
  }
}

TEST_CASE("beam solve ascends and stops at a fixed point") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Scenario full = default_scenario(seed);
    const ReducedScenario red = reduce_to_signal_subspace(full);
    const Scenario& s = red.scenario;
    const InitialPoint init = feasible_initialization(s);
    const double tb = init.tau.tau_bar();
    const BeamSolveResult r = solve_beams(s, tb, init.w);
    for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] >= r.trace[i - 1] - 1e-9);
    CHECK(s.qos_feasible(r.w, tb));
    CHECK(s.power_feasible(r.w));
    BeamSolveOptions tight;
    tight.tol = 1e-12;
    const BeamSolveResult again = solve_beams(s, tb, r.w, tight);
    CHECK(rel_err(again.trace.back(), r.trace.back()) < 1e-6);
    const BeamSolveResult converged = solve_beams(s, tb, again.w, tight);
    CHECK(rel_err(converged.trace.back(), again.trace.back()) < 1e-8);
  }
}

TEST_CASE("beam solve rejects infeasible starts") {
  const Scenario s = default_scenario(2);
  CHECK_THROWS_AS(solve_beams(s, 1.0, BeamformingSet::zeros(4, 10)), Infeasible);
  std::mt19937_64 rng(3);
  CHECK_THROWS_AS(solve_beams(s, 1.0, testing_support::random_beams(4, 10, 1.0, rng)), Infeasible);
}
