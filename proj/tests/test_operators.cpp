// Copyright 2026 The inclusion-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "inclusion_lab/errors.hpp"
#include "inclusion_lab/operators.hpp"
#include "inclusion_lab/sampling.hpp"

using namespace inclusion_lab;

namespace {

// sin ξ = sqrt(π/2) φ₁, and sin ξ cos ξ = ½ sin 2ξ = ½ sqrt(π/2) φ₂.
StateVector sin_profile(int dim) {
  StateVector x = StateVector::Zero(dim);
  x(0) = std::sqrt(M_PI / 2.0);
  return x;
}

StateVector burgers_closed_form(int dim, double nu) {
  StateVector a = StateVector::Zero(dim);
  a(0) = nu * std::sqrt(M_PI / 2.0);
  a(1) = 0.5 * std::sqrt(M_PI / 2.0);
  return a;
}

}  // namespace

TEST_CASE("heat is the diagonal map κΛ") {
  const SpectralTriple t(6);
  const OperatorPtr a = make_heat(t, 0.5);
  Rng rng(1);
  const StateVector x = rng.gaussian(6);
  const StateVector y = a->apply(0.3, x);
  for (int k = 0; k < 6; ++k) CHECK(y(k) == doctest::Approx(0.5 * (k + 1) * (k + 1) * x(k)));
  CHECK(a->is_diagonal_linear());
  CHECK(a->explicit_part(0.0, x).norm() == 0.0);
  const Eigen::MatrixXd j = a->jacobian(0.0, x);
  CHECK((j.diagonal() - 0.5 * t.eigenvalues()).norm() <= 1e-6);
}

TEST_CASE("burgers matches the closed form on the sine profile") {
  const SpectralTriple t(4);
  const double nu = 0.1;
  const StateVector ref = burgers_closed_form(4, nu);
  double previous = 1.0;
  for (int m : {64, 256}) {
    const OperatorPtr a = make_burgers(t, nu, m);
    const double err = (a->apply(0.0, sin_profile(4)) - ref).norm();
    CHECK(err <= 5e-3);
    CHECK(err < previous);
    previous = err;
  }
}

TEST_CASE("burgers convection is skew") {
  const SpectralTriple t(8);
  const OperatorPtr a = make_burgers(t, 0.3);
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const StateVector x = sample_v_ball(t, 3.0, rng);
    const double pairing = a->explicit_part(0.0, x).dot(x);
    CHECK(std::abs(pairing) <= 1e-12 * (1.0 + x.squaredNorm()));
    // Energy pairing equals the viscous part exactly.
    CHECK(a->apply(0.0, x).dot(x) == doctest::Approx(0.3 * t.v_norm(x) * t.v_norm(x)));
  }
}

TEST_CASE("exact heat certificates pass with rounding-level margins") {
  const SpectralTriple t(8);
  const OperatorPtr a = make_heat(t);
  const OperatorCertificates cert = heat_certificates();
  HypothesisSampler s(t, 2.0, 17);
  const auto mono = check_local_monotonicity(*a, cert.monotonicity, s, 500);
  const auto grow = check_growth(*a, cert.growth, s, 500);
  const auto coer = check_coercivity(*a, cert.growth, s, 500);
  for (const auto* r : {&mono, &grow, &coer}) {
    CHECK(r->pass);
    CHECK(r->samples() == 500);
    CHECK(r->min_margin >= -1e-12);
  }
  // Coercivity is tight for the heat operator: ⟨Λx, x⟩ = ‖x‖².
  CHECK(coer.min_margin <= 1e-12);
}

TEST_CASE("certificates that are too strong are rejected") {
  const SpectralTriple t(8);
  const OperatorPtr a = make_heat(t);
  OperatorCertificates cert = heat_certificates();
  cert.growth.c2 = 1.5;
  HypothesisSampler s(t, 2.0, 3);
  const auto r = check_coercivity(*a, cert.growth, s, 200);
  CHECK_FALSE(r.pass);
  REQUIRE(r.witness.has_value());
  CHECK(r.min_margin < 0.0);
}

TEST_CASE("fitted burgers certificates survive a fresh cloud") {
  const SpectralTriple t(8);
  const OperatorPtr a = make_burgers(t, 0.5);
  HypothesisSampler fit(t, 2.0, 100);
  const OperatorCertificates cert = fit_certificates(*a, fit, 2000);
  CHECK(cert.monotonicity.c0 >= 0.0);
  HypothesisSampler fresh(t, 2.0, 200);
  CHECK(check_local_monotonicity(*a, cert.monotonicity, fresh, 2000).pass);
  CHECK(check_growth(*a, cert.growth, fresh, 2000).pass);
  CHECK(check_coercivity(*a, cert.growth, fresh, 2000).pass);
}

TEST_CASE("hemicontinuity: smooth operators pass, gain tables fail") {
  const SpectralTriple t(4);
  const StateVector x = StateVector::Zero(4);
  StateVector y = StateVector::Zero(4);
  y(0) = 2.0;
  StateVector v = StateVector::Zero(4);
  v(0) = 1.0;
  CHECK(check_hemicontinuity(*make_heat(t), 0.0, x, y, v, uniform_s_grid(16)).pass);
  CHECK(check_hemicontinuity(*make_burgers(t, 0.2), 0.0, x, y, v, uniform_s_grid(16)).pass);
  const OperatorPtr jump = make_gain_table(t, {{0.0, 1.0}, {1.0, 3.0}});
  const auto r = check_hemicontinuity(*jump, 0.0, x, y, v, uniform_s_grid(16));
  CHECK_FALSE(r.pass);
}

TEST_CASE("non-finite operator output is an evaluation error") {
  const SpectralTriple t(2);
  const OperatorPtr a = make_custom(t, [](double, const StateVector& x) { return StateVector(x.array().log()); });
  StateVector x(2);
  x << -1.0, 1.0;
  CHECK_THROWS_AS(a->apply(0.0, x), EvaluationError);
  CHECK_THROWS_AS(make_burgers(t, 0.0), ContractViolation);
}

TEST_CASE("reaction diffusion with a linear reaction shifts the spectrum") {
  const SpectralTriple t(4);
  const OperatorPtr a = make_reaction_diffusion(t, {0.0, 2.0}, 64);
  Rng rng(9);
  const StateVector x = rng.gaussian(4);
  const StateVector y = a->apply(0.0, x);
  for (int k = 0; k < 4; ++k) CHECK(y(k) == doctest::Approx(((k + 1) * (k + 1) + 2.0) * x(k)).epsilon(1e-10));
}
