/*
 * Copyright 2026 The elbranch Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the elbranch library. Every object is an opaque handle
 * created and released through this header; every fallible call returns an
 * elb_status and leaves a message for elb_last_error() on failure. Output
 * parameters are written only on success. */

#ifndef ELBRANCH_ELBRANCH_H_
#define ELBRANCH_ELBRANCH_H_

#include <stddef.h>

#if defined(ELB_BUILDING_LIBRARY)
#define ELB_API __attribute__((visibility("default")))
#else
#define ELB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum elb_status {
  ELB_OK = 0,
  ELB_ERR_DOMAIN = 1,
  ELB_ERR_COMPATIBILITY = 2,
  ELB_ERR_NUMERIC = 3,
  ELB_ERR_GEOMETRY = 4,
  ELB_ERR_RESOLUTION = 5,
  ELB_ERR_DIMENSION = 6,
  ELB_ERR_IO = 7,
  ELB_ERR_FORMAT = 8,
  ELB_ERR_PRECONDITION = 9,
  ELB_ERR_INTERNAL = 10
} elb_status;

/* Message of the last failed call on this thread ("" if none). */
ELB_API const char* elb_last_error(void);
ELB_API const char* elb_status_name(elb_status s);
ELB_API const char* elb_version(void);

/* ---- grids and constants ---- */

typedef struct elb_grid {
  int nx, ny;
  double hx, hy;
  double ox, oy; /* lower-left corner */
} elb_grid;

ELB_API elb_status elb_grid_make(int nx, int ny, double x0, double y0, double x1, double y1,
                                 elb_grid* out);

typedef struct elb_exponent_set {
  double alpha;
  int d;
  double beta, gamma1, gamma2;
} elb_exponent_set;

typedef struct elb_profile_constants {
  double alpha, beta;
  double c0, C0, c;
  double c0_error, C0_error;
} elb_profile_constants;

ELB_API elb_status elb_exponents(double alpha, int d, elb_exponent_set* out);
/* tol <= 0 selects the default quadrature tolerance. */
ELB_API elb_status elb_profile_constants_compute(double alpha, double tol,
                                                 elb_profile_constants* out);
ELB_API elb_status elb_optimal_amplitude(double m, double eps, double alpha, double* out);
ELB_API elb_status elb_pointwise_cost(double m, double eps, double alpha, double* out);

/* ---- vector fields (staggered: ux on (nx+1) x ny faces, uy on nx x (ny+1)) ---- */

typedef struct elb_field elb_field;

ELB_API elb_status elb_field_create(const elb_grid* grid, elb_field** out);
ELB_API void elb_field_free(elb_field* f);
ELB_API elb_status elb_field_grid(const elb_field* f, elb_grid* out);
/* Mutable views; valid until the field is freed. */
ELB_API elb_status elb_field_data(elb_field* f, double** ux, size_t* n_ux, double** uy,
                                  size_t* n_uy);
ELB_API elb_status elb_field_read_btf(const char* path, elb_field** out);
ELB_API elb_status elb_field_write_btf(const elb_field* f, const char* path);
ELB_API elb_status elb_field_write_csv(const elb_field* f, const char* path);
/* |u| at cell centers as 16-bit PGM (range in path.txt). */
ELB_API elb_status elb_field_write_norm_pgm(const elb_field* f, const char* path);
/* Cell divergence as a BTF1 scalar file. */
ELB_API elb_status elb_field_write_divergence_btf(const elb_field* f, const char* path);
ELB_API elb_status elb_field_mass(const elb_field* f, double* out);

typedef struct elb_energy_terms {
  double concave;   /* eps^(alpha-1) int rho_delta(|u|) */
  double dirichlet; /* eps^(alpha+1) int |grad u|^2 */
  double total;
} elb_energy_terms;

ELB_API elb_status elb_energy(const elb_field* u, double alpha, double eps, double delta,
                              elb_energy_terms* out);

/* Gradient of psi -> E(grad phi + Rot grad psi). psi and out hold
 * (nx+1)(ny+1) node values, phi holds nx*ny cell values (may be NULL for
 * zero). Requires delta > 0. */
ELB_API elb_status elb_energy_gradient_psi(const elb_grid* grid, const double* psi,
                                           const double* phi, double alpha, double eps,
                                           double delta, double* out);

typedef enum elb_axis { ELB_AXIS_X = 0, ELB_AXIS_Y = 1 } elb_axis;

typedef struct elb_slice_report {
  double bound;         /* int |m|^alpha along the slice axis */
  double window_energy; /* energy density integrated over the window */
  double ratio;         /* c * bound / window_energy */
  double total_variation;
} elb_slice_report;

ELB_API elb_status elb_slice(const elb_field* u, double alpha, double eps, elb_axis axis,
                             double x0, double y0, double x1, double y1,
                             elb_slice_report* out);

/* ---- graphs and atomic measures ---- */

typedef struct elb_graph elb_graph;

ELB_API elb_status elb_graph_create(elb_graph** out);
ELB_API elb_status elb_graph_read(const char* path, elb_graph** out);
ELB_API void elb_graph_free(elb_graph* g);
ELB_API elb_status elb_graph_add_edge(elb_graph* g, double x0, double y0, double x1, double y1,
                                      double w);
ELB_API elb_status elb_graph_edge_count(const elb_graph* g, size_t* out);
ELB_API elb_status elb_graph_edge(const elb_graph* g, size_t i, double* x0, double* y0,
                                  double* x1, double* y1, double* w);
ELB_API elb_status elb_graph_write(const elb_graph* g, const char* path);
/* sum w^alpha |e| */
ELB_API elb_status elb_graph_energy(const elb_graph* g, double alpha, double* out);

typedef struct elb_measure elb_measure;

ELB_API elb_status elb_measure_create(elb_measure** out);
ELB_API elb_status elb_measure_read(const char* path, elb_measure** out);
ELB_API void elb_measure_free(elb_measure* m);
ELB_API elb_status elb_measure_add_atom(elb_measure* m, double x, double y, double mass);
ELB_API elb_status elb_measure_size(const elb_measure* m, size_t* out);
ELB_API elb_status elb_measure_atom(const elb_measure* m, size_t i, double* x, double* y,
                                    double* mass);
ELB_API elb_status elb_measure_total(const elb_measure* m, double* out);
ELB_API elb_status elb_measure_write(const elb_measure* m, const char* path);

/* Exact Wasserstein-1 distance with Euclidean ground cost. */
ELB_API elb_status elb_w1(const elb_measure* mu, const elb_measure* nu, double* out);

/* ---- dyadic functional on [0, 1) ---- */

typedef struct elb_measure1d elb_measure1d;

ELB_API elb_status elb_measure1d_create(elb_measure1d** out);
ELB_API elb_status elb_measure1d_read(const char* path, elb_measure1d** out);
ELB_API void elb_measure1d_free(elb_measure1d* m);
ELB_API elb_status elb_measure1d_add_atom(elb_measure1d* m, double x, double mass);
/* Piecewise-constant density on n equal bins of [0, 1). */
ELB_API elb_status elb_measure1d_set_density(elb_measure1d* m, const double* values, size_t n);
/* levels (optional) receives n_max + 1 level sums. */
ELB_API elb_status elb_galpha(const elb_measure1d* m, double alpha, int n_max, double* out,
                              double* levels);

/* ---- transverse profile ---- */

typedef struct elb_profile elb_profile;

typedef struct elb_profile_info {
  double alpha, beta, theta, eps;
  double amplitude, kappa;
  double plateau_halfwidth, T; /* rescaled units */
  double mass_integral, first_moment;
  double support_halfwidth; /* physical */
} elb_profile_info;

/* n_samples <= 0 selects the default. */
ELB_API elb_status elb_profile_solve(double alpha, double theta, double eps, int n_samples,
                                     elb_profile** out);
ELB_API void elb_profile_free(elb_profile* p);
ELB_API elb_status elb_profile_get_info(const elb_profile* p, elb_profile_info* out);
ELB_API elb_status elb_profile_intensity(const elb_profile* p, double s, double* out);
ELB_API elb_status elb_profile_write_csv(const elb_profile* p, const char* path);

/* ---- graph synthesis ---- */

typedef struct elb_synthesis elb_synthesis;

typedef struct elb_node_report {
  double x, y;
  int degree;
  double imbalance;
  double ball_radius;
  double residual_before, residual_after;
  double correction_energy;
  int corrected;
} elb_node_report;

/* ball_factor <= 0 selects the default. */
ELB_API elb_status elb_synthesize(const elb_graph* g, double alpha, double eps,
                                  const elb_grid* grid, int correct_nodes, double ball_factor,
                                  elb_synthesis** out);
ELB_API void elb_synthesis_free(elb_synthesis* s);
/* The field is owned by the synthesis handle. */
ELB_API elb_status elb_synthesis_field(const elb_synthesis* s, const elb_field** out);
ELB_API elb_status elb_synthesis_node_count(const elb_synthesis* s, size_t* out);
ELB_API elb_status elb_synthesis_node(const elb_synthesis* s, size_t i, elb_node_report* out);
ELB_API elb_status elb_synthesis_warning_count(const elb_synthesis* s, size_t* out);
ELB_API const char* elb_synthesis_warning(const elb_synthesis* s, size_t i);

/* ---- solver ---- */

typedef struct elb_config elb_config;

ELB_API elb_status elb_config_create(elb_config** out);
ELB_API elb_status elb_config_read(const char* path, elb_config** out);
ELB_API void elb_config_free(elb_config* c);
/* Same keys as the configuration file. */
ELB_API elb_status elb_config_set(elb_config* c, const char* key, const char* value);
/* Canonical "key = value" text; owned by the handle, valid until the next call. */
ELB_API const char* elb_config_text(elb_config* c);

typedef struct elb_trace_entry {
  int restart, stage, iteration;
  double eps, delta;
  double concave, dirichlet, energy, objective;
  double step, grad_norm, div_residual, mass;
} elb_trace_entry;

typedef struct elb_stage_summary {
  double eps, delta, sigma;
  int iterations, accepted;
  double objective, grad_norm;
  int failed;
} elb_stage_summary;

typedef struct elb_solve_summary {
  double concave, dirichlet, total;                 /* final eps, delta = 0 */
  double concave_reg, dirichlet_reg, total_reg;     /* final eps and delta */
  double div_residual, mass;
  int mass_feasible, converged;
  int best_restart, restarts;
} elb_solve_summary;

typedef void (*elb_trace_fn)(const elb_trace_entry* entry, void* user);

typedef struct elb_result elb_result;

/* on_iterate may be NULL; it is called from the solving thread(s). */
ELB_API elb_status elb_solve(const elb_config* c, const elb_measure* fplus,
                             const elb_measure* fminus, elb_trace_fn on_iterate, void* user,
                             elb_result** out);
ELB_API void elb_result_free(elb_result* r);
ELB_API elb_status elb_result_summary(const elb_result* r, elb_solve_summary* out);
ELB_API elb_status elb_result_field(const elb_result* r, const elb_field** out);
ELB_API elb_status elb_result_trace_count(const elb_result* r, size_t* out);
ELB_API elb_status elb_result_trace(const elb_result* r, size_t i, elb_trace_entry* out);
ELB_API elb_status elb_result_stage_count(const elb_result* r, size_t* out);
ELB_API elb_status elb_result_stage(const elb_result* r, size_t i, elb_stage_summary* out);
ELB_API const char* elb_result_stage_message(const elb_result* r, size_t i);
ELB_API elb_status elb_result_write_trace_csv(const elb_result* r, const char* path);
/* Human-readable report; owned by the handle. */
ELB_API const char* elb_result_report(elb_result* r);

/* ---- run manifest ---- */

/* Writes dir/manifest.json. Inputs are digested from their paths; outputs are
 * file names inside dir. */
ELB_API elb_status elb_write_manifest(const char* dir, const char* command,
                                      const char* config_text, const char* const* inputs,
                                      size_t n_inputs, const char* const* outputs,
                                      size_t n_outputs, double wall_clock_seconds);
/* 64-bit FNV-1a of a file's bytes. */
ELB_API elb_status elb_file_digest(const char* path, unsigned long long* out);

#ifdef __cplusplus
}
#endif

#endif /* ELBRANCH_ELBRANCH_H_ */
