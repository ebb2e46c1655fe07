// Copyright 2026 The inclusion-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "inclusion_lab/errors.hpp"
#include "inclusion_lab/multifunctions.hpp"
#include "inclusion_lab/operators.hpp"
#include "inclusion_lab/viability.hpp"

using namespace inclusion_lab;

namespace {

struct Heat {
  SpectralTriple triple;
  OperatorPtr op;
  MultifunctionPtr mf;
  TimeGrid grid;
};

Heat heat(int dim, double cp, int steps_per_unit = 256) {
  SpectralTriple t = dim == 1 ? SpectralTriple(std::vector<double>{1.0}) : SpectralTriple(dim);
  return Heat{t, make_heat(t),
              std::make_shared<const Multifunction>(Multifunction::centered_ball(dim, RadiusLaw{cp, 0.0, 0.0}, cp)),
              TimeGrid::uniform(1.0, steps_per_unit)};
}

}  // namespace

TEST_CASE("delta ladder") {
  const TimeGrid g = TimeGrid::uniform(1.0, 64);
  const auto l = delta_ladder(g, 0, 4);
  // dt = 1/64, 1/n = 1/4 = 16 dt.
  CHECK(l == std::vector<int>{1, 2, 4, 8, 16});
  const auto tail = delta_ladder(g, 58, 1);
  CHECK(tail.back() == 6);
  for (int m : tail) CHECK(m <= 6);
}

TEST_CASE("ball constraint: distance, projection, normal") {
  const ConstraintSet k = ConstraintSet::affine_h_ball(StateVector::Constant(2, 1.0), 1.0);
  StateVector x(2);
  x << 1.0, 3.0;
  CHECK(k.distance(x) == doctest::Approx(1.0));
  CHECK((k.project(x) - StateVector::Constant(2, 1.0) - StateVector::Unit(2, 1)).norm() <= 1e-14);
  CHECK((*k.outward_normal(x) - StateVector::Unit(2, 1)).norm() <= 1e-14);
  CHECK_FALSE(k.outward_normal(StateVector::Constant(2, 1.0)).has_value());
  CHECK(ConstraintSet::whole_space(2).distance(x) == 0.0);
}

TEST_CASE("tangency on the boundary of a centered ball") {
  const Heat h = heat(4, 1.0);
  const ConstraintSet k = ConstraintSet::h_ball(4, 2.0);
  const Trajectory x = Trajectory::constant(h.grid, 2.0 * h.triple.unit(0));
  const TangencyResult r = tangency_test_set(k, *h.op, *h.mf, x, 0, 4);
  REQUIRE(r.found());
  const TangencyWitness& w = *r.witness;
  CHECK(w.delta > 0.0);
  CHECK(w.p.norm() <= 1.0 / 4 + 1e-12);
  CHECK(h.mf->distance(0.0, x.state(0), w.b) <= 1e-12);
  CHECK(w.terminal_defect <= 1e-6);
  CHECK(k.distance(w.x.state(w.steps)) <= 1e-6);
}

TEST_CASE("tangency fails where every velocity leaves the set") {
  // x' = -x + f, |f| ≤ 1 on K = [4.5, 5.5]: at x = 4.5 the speed is ≤ -3.5.
  const Heat h = heat(1, 1.0);
  const ConstraintSet k = ConstraintSet::affine_h_ball(StateVector::Constant(1, 5.0), 0.5);
  const Trajectory x = Trajectory::constant(h.grid, StateVector::Constant(1, 4.5));
  const TangencyResult r = tangency_test_set(k, *h.op, *h.mf, x, 0, 2);
  CHECK_FALSE(r.found());
  CHECK(r.best_defect > 0.0);
  CHECK(r.simulations > 0);
  const Trajectory outside = Trajectory::constant(h.grid, StateVector::Constant(1, 3.0));
  CHECK_THROWS_AS(tangency_test_set(k, *h.op, *h.mf, outside, 0, 2), ContractViolation);
}

TEST_CASE("epigraph tangency for constant and time functionals") {
  const Heat h = heat(2, 1.0);
  const Trajectory x = Trajectory::constant(h.grid, h.triple.unit(0));
  EpigraphPoint p{x, 0, 0.0};
  CHECK(tangency_test_epi(constant_functional(0.0), *h.op, *h.mf, p, 4).found());
  // u = 2t grows faster than 1/n: no witness at y = u.
  const PathFunctional fast = [&h](int i, const Trajectory&) { return ExtendedReal(2.0 * h.grid.node(i)); };
  CHECK_FALSE(tangency_test_epi(fast, *h.op, *h.mf, p, 4).found());
  p.y = -1.0;
  CHECK_THROWS_AS(tangency_test_epi(constant_functional(0.0), *h.op, *h.mf, p, 4), ContractViolation);
}

TEST_CASE("approximate solutions in a ball pass the solution check") {
  const Heat h = heat(3, 1.0);
  const ConstraintSet k = ConstraintSet::h_ball(3, 2.0);
  StateVector x0 = StateVector::Zero(3);
  x0(0) = 1.5;
  x0(1) = 0.5;
  const Trajectory hist = Trajectory::constant(h.grid, x0);
  const auto target = ViabilityTarget::constraint(k);
  const ApproxOutcome out = build_eps_approximate(target, *h.op, *h.mf, hist, 0, 0.0, 0.25);
  REQUIRE(out.success());
  const ApproxSolution& s = *out.solution;
  CHECK(s.tau == doctest::Approx(1.0));
  CHECK(check_approx_solution(target, *h.op, *h.mf, s, 0, 0.0).pass);
  for (int i = 0; i <= h.grid.n_steps(); ++i) CHECK(k.distance(s.x.state(i)) <= 1e-6);
  for (std::size_t i = 0; i < s.rho.size(); ++i) CHECK(s.rho[i] <= static_cast<int>(i));
}

TEST_CASE("viable trajectory in a ball refines across levels") {
  const Heat h = heat(3, 1.0);
  const ConstraintSet k = ConstraintSet::h_ball(3, 2.0);
  const Trajectory hist = Trajectory::constant(h.grid, 1.9 * h.triple.unit(0));
  const ViableResult r = viable_trajectory(ViabilityTarget::constraint(k), *h.op, *h.mf, hist, 0, 0.0, 4);
  REQUIRE(r.success);
  CHECK(r.levels.size() == r.max_dist.size());
  CHECK(r.max_dist.back() <= 1e-6);
  CHECK(r.dinf_gaps.size() + 1 == r.levels.size());
}

TEST_CASE("off-center set: construction stops with the oracle escape rate") {
  const Heat h = heat(1, 1.0);
  const ConstraintSet k = ConstraintSet::affine_h_ball(StateVector::Constant(1, 5.0), 0.5);
  const Trajectory hist = Trajectory::constant(h.grid, StateVector::Constant(1, 5.0));
  const ViableResult r = viable_trajectory(ViabilityTarget::constraint(k), *h.op, *h.mf, hist, 0, 0.0, 3);
  CHECK_FALSE(r.success);
  REQUIRE(r.failure.has_value());
  const ApproxFailure& f = *r.failure;
  // One-mode ODE: on the inner boundary x' = -x + f ≤ -x + 1.
  const double oracle = f.stuck_state(0) - 1.0;
  CHECK(f.oracle_escape_rate == doctest::Approx(oracle).epsilon(1e-9));
  CHECK(f.stuck_state(0) < 4.6);
  CHECK(std::abs(f.observed_escape_rate - oracle) <= 0.05 * oracle);
}

TEST_CASE("indicator functional and epigraph target") {
  const ConstraintSet k = ConstraintSet::h_ball(2, 1.0);
  const PathFunctional u = negative_indicator(k);
  const TimeGrid g = TimeGrid::uniform(1.0, 8);
  CHECK(u(0, Trajectory::constant(g, StateVector::Zero(2))) == ExtendedReal(-1.0));
  CHECK(u(0, Trajectory::constant(g, StateVector::Constant(2, 1.0))) == ExtendedReal(0.0));
  const auto target = ViabilityTarget::indicator(k);
  CHECK(target.diagnostic_set.has_value());
  CHECK_FALSE(target.set.has_value());
}
