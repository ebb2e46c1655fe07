// Copyright 2026 The inclusion-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "inclusion_lab/errors.hpp"
#include "inclusion_lab/extended_real.hpp"
#include "inclusion_lab/gelfand.hpp"
#include "inclusion_lab/report.hpp"
#include "inclusion_lab/sampling.hpp"
#include "inclusion_lab/sine_grid.hpp"

using namespace inclusion_lab;

namespace {

// Norms written out term by term.
double h_ref(const StateVector& x) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) s += x(k) * x(k);
  return std::sqrt(s);
}

double v_ref(const StateVector& x) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) s += double((k + 1) * (k + 1)) * x(k) * x(k);
  return std::sqrt(s);
}

double vstar_ref(const StateVector& x) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) s += x(k) * x(k) / double((k + 1) * (k + 1));
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("triple norms on a hand-computed vector") {
  const SpectralTriple t(3);
  StateVector x(3);
  x << 1.0, 2.0, -1.0;
  CHECK(t.h_norm(x) == doctest::Approx(std::sqrt(6.0)));
  CHECK(t.v_norm(x) == doctest::Approx(std::sqrt(1.0 + 16.0 + 9.0)));
  CHECK(t.vstar_norm(x) == doctest::Approx(std::sqrt(1.0 + 1.0 + 1.0 / 9.0)));
  CHECK(t.q() == doctest::Approx(2.0));
  CHECK(SpectralTriple(3, 3.0).q() == doctest::Approx(1.5));
}

TEST_CASE("norm chain and duality on random vectors") {
  const SpectralTriple t(8);
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const StateVector x = rng.gaussian(8);
    const StateVector g = rng.gaussian(8);
    CHECK(t.h_norm(x) == doctest::Approx(h_ref(x)));
    CHECK(t.v_norm(x) == doctest::Approx(v_ref(x)));
    CHECK(t.vstar_norm(x) == doctest::Approx(vstar_ref(x)));
    // λ_k ≥ 1 gives ‖x‖_* ≤ |x| ≤ ‖x‖.
    CHECK(t.vstar_norm(x) <= t.h_norm(x) + 1e-14);
    CHECK(t.h_norm(x) <= t.v_norm(x) + 1e-14);
    CHECK(std::abs(t.pairing(g, x)) <= t.vstar_norm(g) * t.v_norm(x) * (1.0 + 1e-12));
  }
}

TEST_CASE("triple rejects bad input") {
  CHECK_THROWS_AS(SpectralTriple(std::vector<double>{1.0, 0.0}), ContractViolation);
  CHECK_THROWS_AS(SpectralTriple(std::vector<double>{4.0, 1.0}), ContractViolation);
  CHECK_THROWS_AS(SpectralTriple(0), ContractViolation);
  const SpectralTriple t(2);
  CHECK_THROWS_AS(t.h_norm(StateVector::Zero(3)), ContractViolation);
  StateVector bad(2);
  bad << 1.0, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(t.v_norm(bad), ContractViolation);
}

TEST_CASE("extended reals absorb infinity") {
  const ExtendedReal inf = ExtendedReal::infinity();
  const ExtendedReal a(2.5);
  CHECK((a + inf).is_infinite());
  CHECK((inf + a).is_infinite());
  CHECK(min(a, inf) == a);
  CHECK(max(a, inf).is_infinite());
  CHECK(a < inf);
  CHECK_FALSE(inf < inf);
  CHECK(inf == inf);
  CHECK(inf.value_or(-1.0) == -1.0);
  CHECK_THROWS_AS(inf.value(), ContractViolation);
  CHECK_THROWS_AS(ExtendedReal(std::numeric_limits<double>::infinity()), ContractViolation);
  CHECK(scale(inf, 3.0).is_infinite());
  CHECK_THROWS_AS(scale(inf, 0.0), ContractViolation);
  CHECK(difference_quotient(ExtendedReal(3.0), ExtendedReal(1.0), 0.5).value() == 4.0);
  CHECK(difference_quotient(inf, ExtendedReal(1.0), 0.5).is_infinite());
  CHECK_THROWS_AS(difference_quotient(a, inf, 0.5), ContractViolation);
  CHECK(inf.to_string() == "inf");
  CHECK(ExtendedReal(0.1).to_string() == "0.1");
  std::ostringstream s;
  s << a;
  CHECK(s.str() == "2.5");
}

TEST_CASE("sine grid is exactly orthonormal") {
  const SineGrid g(6, 40);
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    const Eigen::VectorXd c = rng.gaussian(6);
    const Eigen::VectorXd back = g.analyze(g.synthesize(c));
    CHECK((back - c).norm() <= 1e-12 * (1.0 + c.norm()));
    const Eigen::VectorXd values = rng.gaussian(40);
    const double lhs = g.analyze(values).dot(c);
    const double rhs = g.spacing() * values.dot(g.synthesize(c));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
  // Mode 1 on the grid against sqrt(2/π) sin ξ.
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(6);
  e1(0) = 1.0;
  const Eigen::VectorXd u = g.synthesize(e1);
  CHECK(u(5) == doctest::Approx(std::sqrt(2.0 / M_PI) * std::sin(g.node(5))));
}

TEST_CASE("normalized margins") {
  CHECK(margin_ge(3.0, 1.0) == doctest::Approx(2.0 / 3.0));
  CHECK(margin_ge(0.5, 0.25) == doctest::Approx(0.25));
  CHECK(margin_le(1.0, 3.0) == doctest::Approx(2.0 / 3.0));
  CHECK(margin_ge(-1e6, 1e6) == doctest::Approx(-2.0));

  HypothesisReport r;
  r.hypothesis = "demo";
  r.record(0.5, 1e-12, Witness{{{"a", 1.0}}, {}});
  r.record(-1e-13, 1e-12, Witness{{{"a", 2.0}}, {}});
  CHECK(r.pass);
  CHECK(r.min_margin == doctest::Approx(-1e-13));
  CHECK(r.witness->scalars.at("a") == 2.0);
  r.record(-1e-3, 1e-12, Witness{{{"a", 3.0}}, {}});
  CHECK_FALSE(r.pass);
  CHECK(r.samples() == 3);
  CHECK(r.to_json().find("\"hypothesis\"") != std::string::npos);
}

TEST_CASE("samplers stay in their balls and are reproducible") {
  const SpectralTriple t(5);
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 500; ++i) {
    const StateVector x = sample_v_ball(t, 2.0, a);
    CHECK(t.v_norm(x) <= 2.0 + 1e-12);
    CHECK(x == sample_v_ball(t, 2.0, b));
  }
  for (int i = 0; i < 500; ++i) CHECK(sample_h_ball(5, 0.5, a).norm() <= 0.5 + 1e-12);
}

TEST_CASE("parallel_for visits each index once") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
}
