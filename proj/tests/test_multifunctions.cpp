// Copyright 2026 The inclusion-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "inclusion_lab/errors.hpp"
#include "inclusion_lab/multifunctions.hpp"
#include "inclusion_lab/sampling.hpp"

using namespace inclusion_lab;

namespace {

StateVector vec(std::initializer_list<double> v) {
  StateVector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double a : v) x(i++) = a;
  return x;
}

std::vector<StateVector> square() {
  return {vec({1, 1}), vec({1, -1}), vec({-1, 1}), vec({-1, -1})};
}

}  // namespace

TEST_CASE("ball support and support point") {
  const auto f = Multifunction::affine_ball(CenterLaw{vec({1.0, 0.0}), 0.0}, RadiusLaw{2.0, 0.0, 0.0}, 3.0);
  const StateVector x = vec({0.3, 0.4});
  const StateVector d = vec({0.0, 3.0});
  CHECK(f.support(0.0, x, d) == doctest::Approx(0.0 + 2.0 * 3.0));
  const StateVector p = f.support_point(0.0, x, d);
  CHECK((p - vec({1.0, 2.0})).norm() <= 1e-14);
  CHECK(f.support_point(0.0, x, StateVector::Zero(2)) == vec({1.0, 0.0}));
  CHECK(f.distance(0.0, x, vec({4.0, 0.0})) == doctest::Approx(1.0));
  CHECK(f.bound(0.0, x) == doctest::Approx(3.0));
  CHECK(f.extreme_points(0.0, x).size() == 4);
}

TEST_CASE("state-dependent radius and center") {
  const auto f = Multifunction::affine_ball(CenterLaw{vec({0.0, 0.0}), 0.5}, RadiusLaw{1.0, 0.25, 0.0}, 2.0);
  const StateVector x = vec({2.0, 0.0});
  CHECK(f.center(0.0, x) == vec({1.0, 0.0}));
  CHECK(f.radius(0.0, x) == doctest::Approx(1.5));
}

TEST_CASE("polytope support is the best vertex") {
  const auto f = Multifunction::polytope(square(), std::sqrt(2.0));
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    const StateVector d = rng.gaussian(2);
    CHECK(f.support(0.0, StateVector::Zero(2), d) == doctest::Approx(std::abs(d(0)) + std::abs(d(1))));
  }
  CHECK(f.center(0.0, StateVector::Zero(2)).norm() <= 1e-15);
}

TEST_CASE("hull projection satisfies the variational inequality") {
  Rng rng(4);
  std::vector<StateVector> pts;
  for (int i = 0; i < 7; ++i) pts.push_back(rng.gaussian(3));
  for (int trial = 0; trial < 50; ++trial) {
    const StateVector y = 3.0 * rng.gaussian(3);
    const StateVector p = project_onto_hull(pts, y);
    // (y - p, v - p) ≤ 0 for every vertex v characterizes the projection.
    for (const auto& v : pts) CHECK((y - p).dot(v - p) <= 1e-9 * (1.0 + y.squaredNorm()));
  }
  const StateVector inside = (pts[0] + pts[1] + pts[2]) / 3.0;
  CHECK((project_onto_hull(pts, inside) - inside).norm() <= 1e-9);
}

TEST_CASE("projection onto a ball and a polytope") {
  const auto ball = Multifunction::centered_ball(2, RadiusLaw{1.0, 0.0, 0.0}, 1.0);
  CHECK((ball.project(0.0, StateVector::Zero(2), vec({3.0, 4.0})) - vec({0.6, 0.8})).norm() <= 1e-14);
  const auto sq = Multifunction::polytope(square(), std::sqrt(2.0));
  CHECK((sq.project(0.0, StateVector::Zero(2), vec({3.0, 0.5})) - vec({1.0, 0.5})).norm() <= 1e-9);
  CHECK(sq.distance(0.0, StateVector::Zero(2), vec({2.0, 2.0})) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("inflated set adds ε to the support") {
  const auto base = std::make_shared<const Multifunction>(Multifunction::polytope(square(), std::sqrt(2.0)));
  const InflatedSet e(base, 0.0, StateVector::Zero(2), 0.1);
  Rng rng(8);
  for (int i = 0; i < 50; ++i) {
    const StateVector d = rng.gaussian(2);
    CHECK(e.support(d) == doctest::Approx(base->support(0.0, StateVector::Zero(2), d) + 0.1 * d.norm()));
    const StateVector p = e.support_point(d);
    CHECK(e.contains(p));
    CHECK(p.dot(d) == doctest::Approx(e.support(d)));
  }
  CHECK(e.distance(vec({1.5, 0.0})) == doctest::Approx(0.4));
  CHECK_FALSE(e.contains(vec({1.2, 0.0})));
}

TEST_CASE("linear growth check uses c_F") {
  const SpectralTriple t(3);
  const auto good = Multifunction::affine_ball(CenterLaw{StateVector::Zero(3), 0.5}, RadiusLaw{1.0, 0.5, 0.0}, 1.0);
  HypothesisSampler s(t, 3.0, 1);
  CHECK(check_linear_growth(good, s, 300).pass);
  const auto bad = Multifunction::affine_ball(CenterLaw{StateVector::Zero(3), 0.5}, RadiusLaw{1.0, 0.5, 0.0}, 0.5);
  CHECK_FALSE(check_linear_growth(bad, s, 300).pass);
}

TEST_CASE("usc: continuous radius passes, an upward jump fails") {
  const StateVector x = vec({1.0, 0.0});
  const auto smooth = Multifunction::centered_ball(2, RadiusLaw{1.0, 0.5, 0.0}, 1.5);
  CHECK(check_usc(smooth, 0.0, x, {1.0, 0.5, 0.25, 0.125, 0.0625}, 3).pass);
  RadiusLaw jump{1.0, 0.0, 1.0};
  jump.step_at = 1.0;
  const auto lsc = Multifunction::centered_ball(2, jump, 2.0);
  const auto r = check_usc(lsc, 0.0, x, {1.0, 0.5, 0.25, 0.125, 0.0625}, 3);
  CHECK_FALSE(r.pass);
  REQUIRE(r.witness.has_value());
  CHECK(r.witness->vectors.count("excess") == 1);
}

TEST_CASE("point_from_coordinates lands in F") {
  const auto ball = Multifunction::centered_ball(3, RadiusLaw{2.0, 0.0, 0.0}, 2.0);
  Rng rng(6);
  for (int i = 0; i < 50; ++i) {
    const StateVector w = sample_h_ball(3, 1.0, rng);
    CHECK(ball.distance(0.0, StateVector::Zero(3), ball.point_from_coordinates(0.0, StateVector::Zero(3), w)) <=
          1e-12);
  }
}
