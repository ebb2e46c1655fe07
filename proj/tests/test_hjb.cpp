// Copyright 2026 The inclusion-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "inclusion_lab/errors.hpp"
#include "inclusion_lab/hjb.hpp"
#include "inclusion_lab/sampling.hpp"

using namespace inclusion_lab;

namespace {

// r' = -r - C_P under full thrust toward the target 0.
double radial_value(double r0, double tau, double cp) {
  return std::max(0.0, r0 * std::exp(-tau) - cp * (1.0 - std::exp(-tau)));
}

struct Radial {
  SpectralTriple triple;
  MayerProblem problem;
  TimeGrid grid;
};

Radial radial(int dim, double horizon, int steps_per_unit) {
  const SpectralTriple t(std::vector<double>(dim, 1.0), 2.0, horizon);
  MayerProblem p{make_heat(t),
                 std::make_shared<const Multifunction>(Multifunction::centered_ball(dim, RadiusLaw{1.0, 0.0, 0.0}, 1.0)),
                 TerminalCost::norm_target(StateVector::Zero(dim))};
  return Radial{t, std::move(p), TimeGrid::uniform(horizon, steps_per_unit)};
}

StateVector along(int dim, double r) {
  StateVector x = StateVector::Zero(dim);
  x(0) = r;
  return x;
}

}  // namespace

TEST_CASE("terminal costs") {
  const TimeGrid g = TimeGrid::uniform(1.0, 4);
  Trajectory x = Trajectory::constant(g, along(2, 1.0));
  x.states.col(4) = along(2, 3.0);
  CHECK(TerminalCost::norm_target(along(2, 1.0))(x).value() == doctest::Approx(2.0));
  const TerminalCost tube = TerminalCost::indicator_tube(2, 2.0);
  CHECK(tube(x).is_infinite());
  CHECK_FALSE(tube.violated(x, 3));
  CHECK(tube.violated(x, 4));
  x.states.col(4) = along(2, 2.0);
  CHECK(tube(x) == ExtendedReal(0.0));
}

TEST_CASE("radial value function matches the closed form") {
  const Radial r = radial(1, std::log(2.0), 8192);
  REQUIRE(is_reducible(r.problem));
  const ValueGrid v = value_dp(r.problem);
  CHECK(v.axes() == ValueGrid::Axes::radial);
  CHECK(v.value(0.0, along(1, 4.0), false).value() == doctest::Approx(1.5).epsilon(1e-3 / 1.5));
  for (double t : {0.0, 0.2, 0.5}) {
    for (double r0 : {2.5, 3.0, 5.0, 6.0}) {
      const double tau = std::log(2.0) - t;
      CHECK(std::abs(v.value(t, along(1, r0), false).value() - radial_value(r0, tau, 1.0)) <= 2e-3);
    }
  }
  CHECK(v.value(0.0, along(1, 0.0), false).value() == doctest::Approx(0.0));
  // Monotone in r at every stored time.
  for (std::size_t ti = 0; ti < v.times().size(); ti += 64) {
    for (int j = 1; j < v.nodes_per_time(); ++j) {
      CHECK(v.at(static_cast<int>(ti), j - 1) <= v.at(static_cast<int>(ti), j));
    }
  }
  // Terminal layer equals h.
  const int last = static_cast<int>(v.times().size()) - 1;
  for (int j = 0; j < v.nodes_per_time(); j += 16) CHECK(v.at(last, j).value() == doctest::Approx(v.nodes()[j]));
}

TEST_CASE("radial reduction in several modes") {
  const Radial r = radial(3, std::log(2.0), 1024);
  const ValueGrid v = value_dp(r.problem);
  StateVector x(3);
  x << 2.0, -2.0, 2.0 * std::sqrt(2.0);  // |x| = 4
  CHECK(std::abs(v.value(0.0, x, false).value() - 1.5) <= 2e-3);
  const StateVector u = v.feedback(0.0, x);
  CHECK(u.norm() == doctest::Approx(1.0));
  CHECK(u.dot(x) < 0.0);
}

TEST_CASE("sampled value dominates the DP value and reaches it with feedback") {
  const Radial r = radial(1, std::log(2.0), 8192);
  const ValueGrid v = value_dp(r.problem);
  const Trajectory h = Trajectory::constant(r.grid, along(1, 4.0));
  const ExtendedReal s = value_sampled(r.problem, h, 0, 16, 1);
  const double dp = v.value(0.0, along(1, 4.0), false).value();
  CHECK(s.value() >= dp - 1e-3);
  CHECK(s.value() <= dp + 1e-3);
}

TEST_CASE("two-mode grid against the reachable-set oracle") {
  // With linear dynamics the endpoint set is e^{-Λτ}x₀ + R, R convex with
  // support σ_R(d) = ∫₀^τ |e^{-Λs} d| ds, so v = max_{|d|=1} ((-e^{-Λτ}x₀, d) - σ_R(d))⁺.
  const double tau = 0.5;
  auto sigma = [&](double a) {
    const int n = 400;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double s = tau * i / n;
      const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      acc += w * std::hypot(std::exp(-s) * std::cos(a), std::exp(-4.0 * s) * std::sin(a));
    }
    return acc * tau / (3.0 * n);
  };
  auto exact = [&](const StateVector& x) {
    const double z0 = -std::exp(-tau) * x(0);
    const double z1 = -std::exp(-4.0 * tau) * x(1);
    auto g = [&](double a) { return z0 * std::cos(a) + z1 * std::sin(a) - sigma(a); };
    double best = 0.0;
    double arg = 0.0;
    for (int k = 0; k < 720; ++k) {
      const double a = 2.0 * M_PI * k / 720;
      if (g(a) > best) best = g(a), arg = a;
    }
    double lo = arg - M_PI / 360;
    double hi = arg + M_PI / 360;
    for (int it = 0; it < 60; ++it) {
      const double m1 = lo + (hi - lo) / 3.0;
      const double m2 = hi - (hi - lo) / 3.0;
      if (g(m1) < g(m2)) {
        lo = m1;
      } else {
        hi = m2;
      }
    }
    return std::max(best, g(0.5 * (lo + hi)));
  };

  const SpectralTriple t(std::vector<double>{1.0, 4.0}, 2.0, tau);
  const MayerProblem p{make_heat(t),
                       std::make_shared<const Multifunction>(
                           Multifunction::centered_ball(2, RadiusLaw{1.0, 0.0, 0.0}, 1.0)),
                       TerminalCost::norm_target(StateVector::Zero(2))};
  std::string why;
  REQUIRE(is_reducible(p, &why));
  const ValueGrid v = value_dp(p, ValueGridSpec{33, 129, 4.0});
  CHECK(v.axes() == ValueGrid::Axes::modal);
  CHECK(v.reduced_dim() == 2);
  CHECK(exact(along(2, 2.0)) == doctest::Approx(2.0 * std::exp(-tau) - (1.0 - std::exp(-tau))));

  const TimeGrid grid = TimeGrid::uniform(tau, 4096);
  Rng rng(4);
  for (int i = 0; i < 5; ++i) {
    const StateVector x0 = 2.0 * rng.unit_direction(2);
    const double ref = exact(x0);
    const double dp = v.value(0.0, x0, false).value();
    const double sampled = value_sampled(p, Trajectory::constant(grid, x0), 0, 16, i).value();
    // Discrete controls and bilinear interpolation of a convex value both
    // bias the grid upward; the cone at the target costs about 2e-2 here.
    CHECK(dp >= ref - 1e-6);
    CHECK(dp <= ref + 3e-2);
    CHECK(sampled >= ref - 1e-3);
  }
  // Along a mode axis no interpolation across the kink is needed.
  CHECK(v.value(0.0, along(2, 2.0), false).value() == doctest::Approx(exact(along(2, 2.0))).epsilon(1e-6));
}

TEST_CASE("non-reducible problems are rejected") {
  const SpectralTriple t(4);
  const MayerProblem p{make_burgers(t, 0.5),
                       std::make_shared<const Multifunction>(
                           Multifunction::centered_ball(4, RadiusLaw{1.0, 0.0, 0.0}, 1.0)),
                       TerminalCost::norm_target(StateVector::Zero(4))};
  std::string why;
  CHECK_FALSE(is_reducible(p, &why));
  CHECK_FALSE(why.empty());
  CHECK_THROWS_AS(value_dp(p), ContractViolation);
}

TEST_CASE("tube value: feasible start gives zero, violated history gives infinity") {
  const SpectralTriple t(4);
  const MayerProblem p{make_heat(t),
                       std::make_shared<const Multifunction>(
                           Multifunction::centered_ball(4, RadiusLaw{1.0, 0.0, 0.0}, 1.0)),
                       TerminalCost::indicator_tube(4, 2.0)};
  const ValueGrid v = value_dp(p, ValueGridSpec{257, 129, 0.0});
  CHECK(v.value(0.0, along(4, 1.9), false) == ExtendedReal(0.0));
  CHECK(v.value(0.5, along(4, 0.0), false) == ExtendedReal(0.0));
  CHECK(v.value(0.0, along(4, 1.9), true).is_infinite());
  CHECK(v.value(0.0, along(4, 3.0), false).is_infinite());
  std::ostringstream csv;
  v.write_csv(csv);
  CHECK(csv.str().rfind("t,r,violated,value\n", 0) == 0);
  CHECK(csv.str().find(",1,inf\n") != std::string::npos);
}

TEST_CASE("dpp holds on the radial problem") {
  const Radial r = radial(1, std::log(2.0), 8192);
  const ValueGrid v = value_dp(r.problem);
  const Trajectory h = Trajectory::constant(r.grid, along(1, 4.0));
  std::vector<double> probes;
  for (int k = 0; k <= 8; ++k) probes.push_back(std::log(2.0) * k / 8.0);
  const HypothesisReport rep = dpp_check(r.problem, v, {DppStart{h, 0}}, probes, 10, 3);
  CHECK(rep.pass);
  CHECK(rep.min_margin >= -1e-3);
}

TEST_CASE("epiderivative of trivial functionals") {
  const Radial r = radial(2, 1.0, 256);
  const Trajectory h = Trajectory::constant(r.grid, along(2, 1.0));
  const std::vector<int> ladder{1, 2, 4, 8};
  const ExtendedReal c = epiderivative(constant_functional(3.0), *r.problem.op, *r.problem.mf, h, 0, {0.05, 0.1},
                                       ladder, 4, 1);
  CHECK(c.value() == 0.0);
  const TimeGrid& g = r.grid;
  const PathFunctional time = [&g](int i, const Trajectory&) { return ExtendedReal(g.node(i)); };
  const ExtendedReal one = epiderivative(time, *r.problem.op, *r.problem.mf, h, 0, {0.05, 0.1}, ladder, 4, 1);
  CHECK(one.value() == doctest::Approx(1.0));
}

TEST_CASE("backward subsolution quotient signs") {
  const TimeGrid g = TimeGrid::uniform(1.0, 64);
  const Trajectory x = Trajectory::constant(g, along(1, 1.0));
  const PathFunctional up = [&g](int i, const Trajectory&) { return ExtendedReal(g.node(i)); };
  const PathFunctional down = [&g](int i, const Trajectory&) { return ExtendedReal(-g.node(i)); };
  CHECK(subsolution_residual(up, x, 32, {1, 2, 4}).value() == doctest::Approx(-1.0));
  CHECK(subsolution_residual(down, x, 32, {1, 2, 4}).value() == doctest::Approx(1.0));
  CHECK(subsolution_residual(constant_functional(2.0), x, 32, {1, 2, 4}).value() == 0.0);
}

TEST_CASE("comparison check") {
  const StateFunction v = [](double t, const StateVector& x) { return ExtendedReal(t + x.norm()); };
  const StateFunction lower = [](double t, const StateVector& x) { return ExtendedReal(t + x.norm() - 0.1); };
  const StateFunction inf = [](double, const StateVector&) { return ExtendedReal::infinity(); };
  std::vector<std::pair<double, StateVector>> pts;
  for (int i = 0; i < 5; ++i) pts.emplace_back(0.1 * i, along(2, i));
  CHECK(comparison_check(lower, v, pts).pass);
  const auto same = comparison_check(v, v, pts);
  CHECK(same.pass);
  CHECK(same.min_margin == doctest::Approx(0.0));
  CHECK_FALSE(comparison_check(v, lower, pts).pass);
  CHECK(comparison_check(v, inf, pts).pass);
  CHECK_FALSE(comparison_check(inf, v, pts).pass);
}

TEST_CASE("viscosity residuals: affine example, zero test function, contradiction device") {
  const SpectralTriple t(4);
  const OperatorPtr a = make_heat(t);
  const auto f = Multifunction::centered_ball(4, RadiusLaw{1.0, 0.0, 0.0}, 1.0);
  const TimeGrid g = TimeGrid::uniform(1.0, 256);
  const Trajectory h = Trajectory::constant(g, t.unit(0));

  // φ = (e₁, x): 0 + ⟨A e₁, e₁⟩ + |e₁| = 2.
  const double plus = viscosity_residual_plus(TestFunction::affine(t.unit(0)), *a, f, h, 0, 0.05, {1, 2, 4}, 8, 1);
  CHECK(plus == doctest::Approx(2.0).epsilon(1e-12));

  const double zero = viscosity_residual_plus(TestFunction::affine(StateVector::Zero(4)), *a, f, h, 0, 0.05,
                                              {1, 2, 4}, 8, 1);
  CHECK(zero == 0.0);

  const Trajectory x = solve_forced(*a, h, 0, g.n_steps(), constant_selector(0.5 * t.unit(1)));
  const double c = 0.75;
  const double u0 = 1.25;
  const TestFunction device = TestFunction::affine(StateVector::Zero(4), u0 + g.node(100) * c, -c);
  CHECK(viscosity_residual_minus(device, *a, x, 100, {1, 2, 4, 8}) == -c);
  CHECK(viscosity_residual_minus(TestFunction::affine(StateVector::Zero(4), 3.0), *a, x, 100, {1, 2}) == 0.0);
}

TEST_CASE("touching spot-check rejects a test function above u") {
  const SpectralTriple t(2);
  const OperatorPtr a = make_heat(t);
  const auto f = Multifunction::centered_ball(2, RadiusLaw{1.0, 0.0, 0.0}, 1.0);
  const TimeGrid g = TimeGrid::uniform(1.0, 64);
  const Trajectory h = Trajectory::constant(g, t.unit(0));
  ViscosityOptions opts;
  opts.u = constant_functional(0.0);
  CHECK_THROWS_AS(viscosity_residual_plus(TestFunction::affine(StateVector::Zero(2), 1.0), *a, f, h, 0, 0.05, {1},
                                          2, 1, opts),
                  ContractViolation);
}

TEST_CASE("test-function identity along a heat trajectory") {
  const SpectralTriple t(3);
  const OperatorPtr a = make_heat(t);
  const TimeGrid g = TimeGrid::uniform(1.0, 512);
  StateVector x0(3);
  x0 << 1.0, -0.5, 0.25;
  const Trajectory x = solve_forced(*a, Trajectory::constant(g, x0), 0, g.n_steps(), constant_selector(t.unit(0)));
  const TestFunction time = TestFunction::time_polynomial({0.0, 1.0}, TestFunction::affine(StateVector::Zero(3)));
  CHECK(check_testfunction_identity(time, x) <= 1e-14);
  const std::vector<TestFunction> phis = {
      TestFunction::affine(t.unit(0), 0.5, 0.25),
      TestFunction::quadratic_in_state(1.0, StateVector::Zero(3)),
      TestFunction::time_polynomial({0.0, 1.0, 0.5}, TestFunction::quadratic_in_state(0.5, t.unit(1)))};
  for (const auto& phi : phis) {
    double lo = 1e300;
    double hi = -1e300;
    for (int i = 0; i <= g.n_steps(); ++i) {
      lo = std::min(lo, phi.value(g.node(i), x.state(i)));
      hi = std::max(hi, phi.value(g.node(i), x.state(i)));
    }
    CHECK(check_testfunction_identity(phi, x) <= 10.0 * g.dt() * (1.0 + hi - lo));
  }
  // The affine φ is exact along the piecewise-linear path.
  CHECK(check_testfunction_identity(phis[0], x) <= 1e-12);
}
