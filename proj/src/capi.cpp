// Copyright 2026 The inclusion-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "inclusion_lab/inclusion_lab.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "inclusion_lab/config.hpp"
#include "inclusion_lab/errors.hpp"
#include "inclusion_lab/hjb.hpp"
#include "inclusion_lab/scenario.hpp"
#include "json_util.hpp"

using namespace inclusion_lab;

struct il_triple {
  SpectralTriple value;
};
struct il_operator {
  OperatorPtr value;
};
struct il_multifunction {
  MultifunctionPtr value;
};
struct il_trajectory {
  Trajectory value;
};
struct il_value_grid {
  ValueGrid value;
};

namespace {

thread_local std::string last_error;

il_status fail(il_status status, const std::string& message) {
  last_error = message;
  return status;
}

// Runs body and maps library exceptions onto status codes.
template <typename Body>
il_status guarded(Body&& body) {
  try {
    last_error.clear();
    body();
    return IL_OK;
  } catch (const ConfigError& e) {
    return fail(IL_ERR_CONFIG, e.what());
  } catch (const SolverError& e) {
    return fail(IL_ERR_SOLVER, e.what());
  } catch (const EvaluationError& e) {
    return fail(IL_ERR_EVALUATION, e.what());
  } catch (const ContractViolation& e) {
    return fail(IL_ERR_CONTRACT, e.what());
  } catch (const Error& e) {
    return fail(IL_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(IL_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(IL_ERR_INTERNAL, e.what());
  }
}

StateVector view(const double* x, int dim) { return Eigen::Map<const Eigen::VectorXd>(x, dim); }

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

#define IL_REQUIRE_ARG(cond, msg) \
  if (!(cond)) return fail(IL_ERR_INVALID_ARGUMENT, msg)

}  // namespace

extern "C" {

const char* il_version(void) { return "0.1.0"; }

const char* il_last_error(void) { return last_error.c_str(); }

void il_string_free(char* s) { std::free(s); }

il_status il_triple_create(int dim, const double* lambda, double p, double horizon, il_triple** out) {
  IL_REQUIRE_ARG(out != nullptr, "il_triple_create: out is NULL");
  IL_REQUIRE_ARG(dim >= 1, "il_triple_create: dim must be positive");
  return guarded([&] {
    if (lambda) {
      *out = new il_triple{SpectralTriple(std::vector<double>(lambda, lambda + dim), p, horizon)};
    } else {
      *out = new il_triple{SpectralTriple(dim, p, horizon)};
    }
  });
}

void il_triple_destroy(il_triple* triple) { delete triple; }

il_status il_triple_dim(const il_triple* triple, int* dim) {
  IL_REQUIRE_ARG(triple && dim, "il_triple_dim: NULL argument");
  *dim = triple->value.dim();
  return IL_OK;
}

il_status il_triple_norms(const il_triple* triple, const double* x, double* h, double* v, double* vstar) {
  IL_REQUIRE_ARG(triple && x, "il_triple_norms: NULL argument");
  return guarded([&] {
    const StateVector s = view(x, triple->value.dim());
    if (h) *h = triple->value.h_norm(s);
    if (v) *v = triple->value.v_norm(s);
    if (vstar) *vstar = triple->value.vstar_norm(s);
  });
}

il_status il_operator_create_heat(const il_triple* triple, double diffusivity, il_operator** out) {
  IL_REQUIRE_ARG(triple && out, "il_operator_create_heat: NULL argument");
  return guarded([&] { *out = new il_operator{make_heat(triple->value, diffusivity)}; });
}

il_status il_operator_create_burgers(const il_triple* triple, double nu, int grid_points, il_operator** out) {
  IL_REQUIRE_ARG(triple && out, "il_operator_create_burgers: NULL argument");
  return guarded([&] { *out = new il_operator{make_burgers(triple->value, nu, grid_points)}; });
}

void il_operator_destroy(il_operator* op) { delete op; }

il_status il_operator_apply(const il_operator* op, double t, const double* x, double* out) {
  IL_REQUIRE_ARG(op && x && out, "il_operator_apply: NULL argument");
  return guarded([&] {
    const int dim = op->value->triple().dim();
    const StateVector y = op->value->apply(t, view(x, dim));
    std::memcpy(out, y.data(), sizeof(double) * static_cast<std::size_t>(dim));
  });
}

il_status il_multifunction_create_ball(int dim, const double* center, double radius, il_multifunction** out) {
  IL_REQUIRE_ARG(out != nullptr, "il_multifunction_create_ball: out is NULL");
  IL_REQUIRE_ARG(dim >= 1, "il_multifunction_create_ball: dim must be positive");
  return guarded([&] {
    const RadiusLaw law{radius, 0.0, 0.0};
    if (center) {
      const StateVector c = view(center, dim);
      *out = new il_multifunction{std::make_shared<const Multifunction>(
          Multifunction::affine_ball(CenterLaw{c, 0.0}, law, c.norm() + radius))};
    } else {
      *out = new il_multifunction{
          std::make_shared<const Multifunction>(Multifunction::centered_ball(dim, law, radius))};
    }
  });
}

il_status il_multifunction_create_polytope(int dim, int n_vertices, const double* vertices, il_multifunction** out) {
  IL_REQUIRE_ARG(out && vertices, "il_multifunction_create_polytope: NULL argument");
  IL_REQUIRE_ARG(dim >= 1 && n_vertices >= 1, "il_multifunction_create_polytope: bad size");
  return guarded([&] {
    std::vector<StateVector> pts;
    double c = 0.0;
    for (int i = 0; i < n_vertices; ++i) {
      pts.push_back(view(vertices + static_cast<std::ptrdiff_t>(i) * dim, dim));
      c = std::max(c, pts.back().norm());
    }
    *out = new il_multifunction{std::make_shared<const Multifunction>(Multifunction::polytope(std::move(pts), c))};
  });
}

void il_multifunction_destroy(il_multifunction* mf) { delete mf; }

il_status il_multifunction_support(const il_multifunction* mf, double t, const double* x, const double* d,
                                   double* out) {
  IL_REQUIRE_ARG(mf && x && d && out, "il_multifunction_support: NULL argument");
  return guarded([&] {
    const int dim = mf->value->dim();
    *out = mf->value->support(t, view(x, dim), view(d, dim));
  });
}

il_status il_trajectory_solve(const il_operator* op, const double* x0, const double* forcing, int steps_per_unit,
                              il_trajectory** out) {
  IL_REQUIRE_ARG(op && x0 && forcing && out, "il_trajectory_solve: NULL argument");
  IL_REQUIRE_ARG(steps_per_unit >= 1, "il_trajectory_solve: steps_per_unit must be positive");
  return guarded([&] {
    const int dim = op->value->triple().dim();
    const TimeGrid grid = TimeGrid::uniform(op->value->triple().horizon(), steps_per_unit);
    const Trajectory history = Trajectory::constant(grid, view(x0, dim), 0);
    *out = new il_trajectory{
        solve_forced(*op->value, history, 0, grid.n_steps(), constant_selector(view(forcing, dim)))};
  });
}

void il_trajectory_destroy(il_trajectory* x) { delete x; }

il_status il_trajectory_size(const il_trajectory* x, int* dim, int* nodes) {
  IL_REQUIRE_ARG(x && dim && nodes, "il_trajectory_size: NULL argument");
  *dim = x->value.dim();
  *nodes = x->value.grid.n_steps() + 1;
  return IL_OK;
}

il_status il_trajectory_state(const il_trajectory* x, int node, double* t, double* state) {
  IL_REQUIRE_ARG(x && state, "il_trajectory_state: NULL argument");
  IL_REQUIRE_ARG(node >= 0 && node <= x->value.grid.n_steps(), "il_trajectory_state: node out of range");
  if (t) *t = x->value.grid.node(node);
  const StateVector s = x->value.state(node);
  std::memcpy(state, s.data(), sizeof(double) * static_cast<std::size_t>(s.size()));
  return IL_OK;
}

il_status il_value_grid_create_norm(const il_operator* op, const il_multifunction* mf, const double* target,
                                    int time_nodes, int state_nodes, il_value_grid** out) {
  IL_REQUIRE_ARG(op && mf && out, "il_value_grid_create_norm: NULL argument");
  return guarded([&] {
    const int dim = op->value->triple().dim();
    const StateVector tgt = target ? view(target, dim) : StateVector(StateVector::Zero(dim));
    const MayerProblem problem{op->value, mf->value, TerminalCost::norm_target(tgt)};
    *out = new il_value_grid{value_dp(problem, ValueGridSpec{time_nodes, state_nodes, 0.0})};
  });
}

il_status il_value_grid_create_tube(const il_operator* op, const il_multifunction* mf, double radius, int time_nodes,
                                    int state_nodes, il_value_grid** out) {
  IL_REQUIRE_ARG(op && mf && out, "il_value_grid_create_tube: NULL argument");
  return guarded([&] {
    const int dim = op->value->triple().dim();
    const MayerProblem problem{op->value, mf->value, TerminalCost::indicator_tube(dim, radius)};
    *out = new il_value_grid{value_dp(problem, ValueGridSpec{time_nodes, state_nodes, 0.0})};
  });
}

void il_value_grid_destroy(il_value_grid* v) { delete v; }

il_status il_value_grid_value(const il_value_grid* v, double t, const double* x, int violated, double* value,
                              int* is_infinite) {
  IL_REQUIRE_ARG(v && x && value && is_infinite, "il_value_grid_value: NULL argument");
  return guarded([&] {
    const ExtendedReal r = v->value.value(t, view(x, v->value.state_dim()), violated != 0);
    *is_infinite = r.is_infinite() ? 1 : 0;
    if (r.is_finite()) *value = r.value();
  });
}

il_status il_preset_config(const char* name, char** json_out) {
  IL_REQUIRE_ARG(name && json_out, "il_preset_config: NULL argument");
  return guarded([&] { *json_out = duplicate(dump_config(preset_config(name))); });
}

il_status il_normalize_config(const char* config_json, char** json_out) {
  IL_REQUIRE_ARG(config_json && json_out, "il_normalize_config: NULL argument");
  return guarded([&] { *json_out = duplicate(dump_config(parse_config(config_json))); });
}

il_status il_run_scenario(const char* config_json, const char* scenario, const uint64_t* seed, const char* out_dir,
                          char** result_json) {
  IL_REQUIRE_ARG(config_json && result_json, "il_run_scenario: NULL argument");
  return guarded([&] {
    RunConfig config = parse_config(config_json);
    if (scenario) config.scenario = scenario;
    if (seed) config.seed = *seed;
    if (out_dir) config.out = out_dir;
    const ScenarioResult r = run(config);
    detail::json j;
    j["scenario"] = r.scenario;
    j["pass"] = r.pass;
    detail::json crit = detail::json::array();
    for (const auto& c : r.criteria) crit.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    j["criteria"] = crit;
    j["artifacts"] = r.artifacts;
    j["report_path"] = r.report_path;
    j["wall_clock_seconds"] = r.wall_clock_seconds;
    *result_json = duplicate(j.dump(2));
  });
}

}  // extern "C"
