/* Copyright 2026 The inclusion-lab Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface of inclusion-lab. Every object is an opaque handle created by
 * an il_*_create function and released by the matching il_*_destroy (which
 * accepts NULL). Functions return an il_status; on failure il_last_error()
 * describes the problem for the calling thread. Strings returned through
 * char** parameters are owned by the caller and must be released with
 * il_string_free. States are arrays of `dim` doubles in modal coordinates.
 */

#ifndef INCLUSION_LAB_H
#define INCLUSION_LAB_H

#include <stdint.h>

#if defined(_WIN32)
#if defined(INCLUSION_LAB_BUILDING)
#define IL_API __declspec(dllexport)
#else
#define IL_API __declspec(dllimport)
#endif
#else
#define IL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum il_status {
  IL_OK = 0,
  IL_ERR_INVALID_ARGUMENT = 1, /* null pointer or bad size */
  IL_ERR_CONTRACT = 2,         /* documented precondition violated */
  IL_ERR_EVALUATION = 3,       /* non-finite operator value */
  IL_ERR_SOLVER = 4,           /* implicit step failed */
  IL_ERR_CONFIG = 5,           /* run config rejected; message names the field */
  IL_ERR_IO = 6,
  IL_ERR_INTERNAL = 7
} il_status;

typedef struct il_triple il_triple;
typedef struct il_operator il_operator;
typedef struct il_multifunction il_multifunction;
typedef struct il_trajectory il_trajectory;
typedef struct il_value_grid il_value_grid;

IL_API const char* il_version(void);

/* Message of the last failed call on this thread; "" when none. */
IL_API const char* il_last_error(void);

IL_API void il_string_free(char* s);

/* Spectral triple. `lambda` may be NULL for λ_k = k². */
IL_API il_status il_triple_create(int dim, const double* lambda, double p, double horizon, il_triple** out);
IL_API void il_triple_destroy(il_triple* triple);
IL_API il_status il_triple_dim(const il_triple* triple, int* dim);
/* Any of h, v, vstar may be NULL. */
IL_API il_status il_triple_norms(const il_triple* triple, const double* x, double* h, double* v, double* vstar);

/* Operators. */
IL_API il_status il_operator_create_heat(const il_triple* triple, double diffusivity, il_operator** out);
IL_API il_status il_operator_create_burgers(const il_triple* triple, double nu, int grid_points, il_operator** out);
IL_API void il_operator_destroy(il_operator* op);
IL_API il_status il_operator_apply(const il_operator* op, double t, const double* x, double* out);

/* Multifunctions. `center` may be NULL for a ball centered at 0. Vertices
 * are stored row-major, one vertex per row. */
IL_API il_status il_multifunction_create_ball(int dim, const double* center, double radius, il_multifunction** out);
IL_API il_status il_multifunction_create_polytope(int dim, int n_vertices, const double* vertices,
                                                  il_multifunction** out);
IL_API void il_multifunction_destroy(il_multifunction* mf);
IL_API il_status il_multifunction_support(const il_multifunction* mf, double t, const double* x, const double* d,
                                          double* out);

/* Solves x' + A(t, x) = f on [0, T] with constant f and x(0) = x0. */
IL_API il_status il_trajectory_solve(const il_operator* op, const double* x0, const double* forcing, int steps_per_unit,
                                     il_trajectory** out);
IL_API void il_trajectory_destroy(il_trajectory* x);
IL_API il_status il_trajectory_size(const il_trajectory* x, int* dim, int* nodes);
/* `state` receives dim values; `t` may be NULL. */
IL_API il_status il_trajectory_state(const il_trajectory* x, int node, double* t, double* state);

/* Value function of min |x(T) - target| (target NULL means 0). */
IL_API il_status il_value_grid_create_norm(const il_operator* op, const il_multifunction* mf, const double* target,
                                           int time_nodes, int state_nodes, il_value_grid** out);
/* Value function of the tube indicator: 0 if |x(t)| <= radius on [0, T]. */
IL_API il_status il_value_grid_create_tube(const il_operator* op, const il_multifunction* mf, double radius,
                                           int time_nodes, int state_nodes, il_value_grid** out);
IL_API void il_value_grid_destroy(il_value_grid* v);
/* *is_infinite is set to 1 for the +∞ sentinel (then *value is untouched). */
IL_API il_status il_value_grid_value(const il_value_grid* v, double t, const double* x, int violated, double* value,
                                     int* is_infinite);

/* Built-in run config as JSON. */
IL_API il_status il_preset_config(const char* name, char** json_out);
/* Canonical, fully defaulted form of a JSON run config. */
IL_API il_status il_normalize_config(const char* config_json, char** json_out);

/* Runs a scenario. `scenario`, `seed` and `out_dir` override the config when
 * non-NULL. Returns IL_OK whenever the run completed; the JSON summary
 * carries "pass", "criteria", "artifacts", "report_path" and
 * "wall_clock_seconds". */
IL_API il_status il_run_scenario(const char* config_json, const char* scenario, const uint64_t* seed,
                                 const char* out_dir, char** result_json);

#ifdef __cplusplus
}
#endif

#endif /* INCLUSION_LAB_H */
