// Copyright 2026 The inclusion-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "inclusion_lab/errors.hpp"
#include "inclusion_lab/multifunctions.hpp"
#include "inclusion_lab/operators.hpp"
#include "inclusion_lab/sampling.hpp"
#include "inclusion_lab/trajectories.hpp"

using namespace inclusion_lab;

namespace {

double single_mode_error(int steps) {
  const SpectralTriple t(std::vector<double>{1.0}, 2.0, 1.0);
  const OperatorPtr a = make_heat(t);
  const TimeGrid grid(0.0, 1.0, steps);
  const Trajectory h = Trajectory::constant(grid, StateVector::Ones(1));
  const Trajectory x = solve_forced(*a, h, 0, steps, zero_selector(1));
  return std::abs(x.final_state()(0) - std::exp(-1.0));
}

}  // namespace

TEST_CASE("time grid nodes and lookups") {
  const TimeGrid g(0.0, 1.0, 8);
  CHECK(g.dt() == doctest::Approx(0.125));
  CHECK(g.node(8) == 1.0);
  CHECK(g.index_of(0.375) == 3);
  CHECK_THROWS_AS(g.index_of(0.3), ContractViolation);
  CHECK(g.floor_index(0.3) == 2);
  CHECK(g.floor_index(5.0) == 8);
  CHECK(TimeGrid::uniform(0.5, 512).n_steps() == 256);
}

TEST_CASE("single-mode heat converges at first order") {
  const double e1 = single_mode_error(10000);
  const double e2 = single_mode_error(20000);
  CHECK(e1 < 5e-5);
  CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("constant forcing approaches the steady state") {
  const SpectralTriple t(std::vector<double>{1.0, 4.0}, 2.0, 2.0);
  const OperatorPtr a = make_heat(t);
  const TimeGrid grid = TimeGrid::uniform(2.0, 4096);
  StateVector x0(2);
  x0 << 1.0, -1.0;
  StateVector f(2);
  f << 2.0, 1.0;
  const Trajectory x = solve_forced(*a, Trajectory::constant(grid, x0), 0, grid.n_steps(), constant_selector(f));
  for (int k = 0; k < 2; ++k) {
    const double lam = t.lambda(k);
    const double exact = f(k) / lam + (x0(k) - f(k) / lam) * std::exp(-lam * 2.0);
    CHECK(x.final_state()(k) == doctest::Approx(exact).epsilon(2e-3));
  }
  CHECK(x.max_residual() <= 1e-12);
  CHECK((scheme_residual(*a, x) - x.residual).norm() <= 1e-12);
}

TEST_CASE("fully implicit burgers solves the implicit equation and dissipates energy") {
  const SpectralTriple t(6);
  const OperatorPtr a = make_burgers(t, 0.2);
  const TimeGrid grid = TimeGrid::uniform(1.0, 256);
  StateVector x0 = StateVector::Zero(6);
  x0(0) = 1.5;
  x0(1) = -0.5;
  SolveOptions opts;
  opts.fully_implicit = true;
  const Trajectory x = solve_forced(*a, Trajectory::constant(grid, x0), 0, grid.n_steps(), zero_selector(6), opts);
  CHECK(x.fully_implicit);
  CHECK(x.max_residual() <= 1e-9);
  for (int i = 0; i < grid.n_steps(); ++i) CHECK(x.state(i + 1).norm() < x.state(i).norm());
}

TEST_CASE("history is frozen and the path starts at start_index") {
  const SpectralTriple t(2);
  const OperatorPtr a = make_heat(t);
  const TimeGrid grid = TimeGrid::uniform(1.0, 64);
  Trajectory h = Trajectory::constant(grid, StateVector::Ones(2), 16);
  for (int i = 0; i <= 16; ++i) h.states.col(i) *= 1.0 + i / 16.0;
  const Trajectory x = solve_forced(*a, h, 16, 48, zero_selector(2));
  for (int i = 0; i <= 16; ++i) CHECK(x.state(i) == h.state(i));
  CHECK(x.start_index == 16);
  CHECK(x.end_index == 48);
  CHECK(x.state(64) == x.state(48));
  CHECK(x.t_start() == doctest::Approx(0.25));
}

TEST_CASE("dinf distance of two single-mode decays") {
  const SpectralTriple t(std::vector<double>{1.0}, 2.0, 1.0);
  const OperatorPtr a = make_heat(t);
  const TimeGrid grid = TimeGrid::uniform(1.0, 128);
  auto decay = [&](double x0) {
    return solve_forced(*a, Trajectory::constant(grid, StateVector::Constant(1, x0)), 0, grid.n_steps(),
                        zero_selector(1));
  };
  const Trajectory x1 = decay(1.0);
  const Trajectory x2 = decay(2.0);
  CHECK(dinf_distance(1.0, x1, 1.0, x2) == doctest::Approx(1.0));
  CHECK(dinf_distance(1.0, x1, 1.0, x1) == 0.0);
  // Stopping at different times adds |t2 - t1| and compares frozen tails.
  CHECK(dinf_distance(0.5, x1, 1.0, x1) >= 0.5);
}

TEST_CASE("sampled paths stay in F and are reproducible") {
  const SpectralTriple t(4);
  const OperatorPtr a = make_heat(t);
  const auto f = Multifunction::centered_ball(4, RadiusLaw{1.0, 0.0, 0.0}, 1.0);
  const TimeGrid grid = TimeGrid::uniform(1.0, 128);
  const Trajectory h = Trajectory::constant(grid, t.unit(0));
  for (XFStrategy s : {XFStrategy::bang_bang, XFStrategy::random_interior, XFStrategy::feedback}) {
    XFSampleOptions opts;
    opts.strategy = s;
    Rng r1(9);
    Rng r2(9);
    const auto p1 = sample_XF(*a, f, h, 0, grid.n_steps(), 5, r1, opts);
    const auto p2 = sample_XF(*a, f, h, 0, grid.n_steps(), 5, r2, opts);
    REQUIRE(p1.size() == 5);
    for (std::size_t i = 0; i < p1.size(); ++i) {
      CHECK(membership_residual(f, p1[i]) <= 1e-9);
      CHECK(p1[i].states == p2[i].states);
    }
  }
}

TEST_CASE("Lp(V) and Lq(V*) seminorms of a single-mode decay") {
  const SpectralTriple t(std::vector<double>{1.0}, 2.0, 1.0);
  const OperatorPtr a = make_heat(t);
  const TimeGrid grid = TimeGrid::uniform(1.0, 4096);
  const Trajectory x =
      solve_forced(*a, Trajectory::constant(grid, StateVector::Ones(1)), 0, grid.n_steps(), zero_selector(1));
  const WpqSeminorms w = wpq_seminorms(t, x);
  const double exact = std::sqrt((1.0 - std::exp(-2.0)) / 2.0);
  CHECK(w.lp_v == doctest::Approx(exact).epsilon(1e-3));
  CHECK(w.lq_vstar == doctest::Approx(exact).epsilon(1e-3));
}

TEST_CASE("a-priori bound holds for fully implicit forced paths") {
  const SpectralTriple t(6);
  const OperatorPtr a = make_heat(t);
  const auto f = Multifunction::centered_ball(6, RadiusLaw{1.0, 0.0, 0.0}, 1.0);
  const TimeGrid grid = TimeGrid::uniform(1.0, 128);
  const Trajectory h = Trajectory::constant(grid, t.unit(0));
  XFSampleOptions opts;
  opts.solve.fully_implicit = true;
  Rng rng(12);
  const auto paths = sample_XF(*a, f, h, 0, grid.n_steps(), 20, rng, opts);
  const auto r = check_apriori(*a, heat_certificates().growth, 1.0, 1.0, paths);
  CHECK(r.pass);
  CHECK(r.samples() == 20);
  CHECK(r.min_margin > 0.0);
  CHECK(bc_radius(1.0, h, 0) == doctest::Approx(2.0));
}
