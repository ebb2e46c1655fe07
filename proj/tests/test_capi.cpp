// Copyright 2026 The inclusion-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>

#include "inclusion_lab/inclusion_lab.h"

TEST_CASE("triple handle and norms") {
  il_triple* t = nullptr;
  REQUIRE(il_triple_create(3, nullptr, 2.0, 1.0, &t) == IL_OK);
  int dim = 0;
  CHECK(il_triple_dim(t, &dim) == IL_OK);
  CHECK(dim == 3);
  const double x[3] = {1.0, 2.0, -1.0};
  double h = 0.0;
  double v = 0.0;
  double vs = 0.0;
  CHECK(il_triple_norms(t, x, &h, &v, &vs) == IL_OK);
  CHECK(h == doctest::Approx(std::sqrt(6.0)));
  CHECK(v == doctest::Approx(std::sqrt(26.0)));
  CHECK(vs == doctest::Approx(std::sqrt(1.0 + 1.0 + 1.0 / 9.0)));
  CHECK(il_triple_norms(t, x, nullptr, nullptr, nullptr) == IL_OK);
  il_triple_destroy(t);
  il_triple_destroy(nullptr);
}

TEST_CASE("errors map to status codes") {
  il_triple* t = nullptr;
  const double bad[2] = {1.0, 0.0};
  CHECK(il_triple_create(2, bad, 2.0, 1.0, &t) == IL_ERR_CONTRACT);
  CHECK(t == nullptr);
  CHECK(std::strlen(il_last_error()) > 0);
  CHECK(il_triple_create(0, nullptr, 2.0, 1.0, &t) == IL_ERR_INVALID_ARGUMENT);
  CHECK(il_triple_dim(nullptr, nullptr) == IL_ERR_INVALID_ARGUMENT);
  char* out = nullptr;
  CHECK(il_normalize_config(R"({"triple": {"lambda": [1.0, -2.0]}})", &out) == IL_ERR_CONFIG);
  CHECK(std::string(il_last_error()).find("triple.lambda[1]") != std::string::npos);
  CHECK(il_preset_config("missing", &out) == IL_ERR_CONFIG);
  REQUIRE(il_preset_config("radial", &out) == IL_OK);
  CHECK(std::string(il_last_error()).empty());
  CHECK(std::string(out).find("\"horizon\"") != std::string::npos);
  il_string_free(out);
}

TEST_CASE("operator, multifunction and trajectory handles") {
  il_triple* t = nullptr;
  const double lambda[1] = {1.0};
  REQUIRE(il_triple_create(1, lambda, 2.0, 1.0, &t) == IL_OK);
  il_operator* a = nullptr;
  REQUIRE(il_operator_create_heat(t, 1.0, &a) == IL_OK);
  const double x0[1] = {2.0};
  double y[1] = {0.0};
  CHECK(il_operator_apply(a, 0.0, x0, y) == IL_OK);
  CHECK(y[0] == 2.0);

  il_multifunction* f = nullptr;
  REQUIRE(il_multifunction_create_ball(1, nullptr, 1.0, &f) == IL_OK);
  const double d[1] = {-3.0};
  double s = 0.0;
  CHECK(il_multifunction_support(f, 0.0, x0, d, &s) == IL_OK);
  CHECK(s == doctest::Approx(3.0));

  // x' = -x + 1 from 2: x(1) = 1 + e^{-1}.
  il_trajectory* x = nullptr;
  const double forcing[1] = {1.0};
  REQUIRE(il_trajectory_solve(a, x0, forcing, 8192, &x) == IL_OK);
  int dim = 0;
  int nodes = 0;
  CHECK(il_trajectory_size(x, &dim, &nodes) == IL_OK);
  CHECK(dim == 1);
  CHECK(nodes == 8193);
  double tt = 0.0;
  double state[1] = {0.0};
  CHECK(il_trajectory_state(x, nodes - 1, &tt, state) == IL_OK);
  CHECK(tt == 1.0);
  CHECK(state[0] == doctest::Approx(1.0 + std::exp(-1.0)).epsilon(1e-4));
  CHECK(il_trajectory_state(x, nodes, &tt, state) == IL_ERR_INVALID_ARGUMENT);

  il_trajectory_destroy(x);
  il_multifunction_destroy(f);
  il_operator_destroy(a);
  il_triple_destroy(t);
}

TEST_CASE("value grids through the C interface") {
  il_triple* t = nullptr;
  const double lambda[1] = {1.0};
  REQUIRE(il_triple_create(1, lambda, 2.0, std::log(2.0), &t) == IL_OK);
  il_operator* a = nullptr;
  REQUIRE(il_operator_create_heat(t, 1.0, &a) == IL_OK);
  il_multifunction* f = nullptr;
  REQUIRE(il_multifunction_create_ball(1, nullptr, 1.0, &f) == IL_OK);

  il_value_grid* v = nullptr;
  REQUIRE(il_value_grid_create_norm(a, f, nullptr, 513, 257, &v) == IL_OK);
  const double x[1] = {4.0};
  double value = -1.0;
  int inf = -1;
  CHECK(il_value_grid_value(v, 0.0, x, 0, &value, &inf) == IL_OK);
  CHECK(inf == 0);
  CHECK(std::abs(value - 1.5) <= 2e-3);
  il_value_grid_destroy(v);

  REQUIRE(il_value_grid_create_tube(a, f, 2.0, 65, 65, &v) == IL_OK);
  const double inside[1] = {1.0};
  CHECK(il_value_grid_value(v, 0.0, inside, 0, &value, &inf) == IL_OK);
  CHECK(inf == 0);
  CHECK(value == 0.0);
  value = 42.0;
  CHECK(il_value_grid_value(v, 0.0, inside, 1, &value, &inf) == IL_OK);
  CHECK(inf == 1);
  CHECK(value == 42.0);
  il_value_grid_destroy(v);

  il_multifunction_destroy(f);
  il_operator_destroy(a);
  il_triple_destroy(t);
}

TEST_CASE("run a scenario and read the summary") {
  char* cfg = nullptr;
  REQUIRE(il_preset_config("radial", &cfg) == IL_OK);
  char* summary = nullptr;
  const uint64_t seed = 3;
  REQUIRE(il_run_scenario(cfg, "value", &seed, "capi_out", &summary) == IL_OK);
  const std::string s(summary);
  CHECK(s.find("\"pass\": true") != std::string::npos);
  CHECK(s.find("value_grid.csv") != std::string::npos);
  CHECK(s.find("report.json") != std::string::npos);
  il_string_free(summary);
  CHECK(il_run_scenario(cfg, "nonsense", nullptr, "capi_out", &summary) == IL_ERR_CONFIG);
  il_string_free(cfg);
}
