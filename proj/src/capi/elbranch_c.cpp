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

#include "elbranch/elbranch.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>

#include "elbranch/constants.hpp"
#include "elbranch/diagnostics.hpp"
#include "elbranch/energy.hpp"
#include "elbranch/error.hpp"
#include "elbranch/grid.hpp"
#include "elbranch/io.hpp"
#include "elbranch/measures.hpp"
#include "elbranch/profile.hpp"
#include "elbranch/solver.hpp"

struct elb_field {
  elbranch::VectorField2D u;
};
struct elb_graph {
  elbranch::WeightedGraph g;
};
struct elb_measure {
  elbranch::AtomicMeasure m;
};
struct elb_measure1d {
  elbranch::Measure1D m;
};
struct elb_profile {
  elbranch::TransverseProfile p;
};
struct elb_synthesis {
  elbranch::SynthesisResult s;
  elb_field field;
};
struct elb_config {
  elbranch::SolverConfig c;
  std::string text;
};
struct elb_result {
  elbranch::SolveResult r;
  elbranch::SolverConfig cfg;
  elb_field field;
  std::string report;
};

namespace {

using namespace elbranch;

thread_local std::string g_last_error;

elb_status set_error(elb_status s, const char* what) {
  g_last_error = what;
  return s;
}

// Runs f, translating exceptions into status codes.
template <class F>
elb_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return ELB_OK;
  } catch (const Error& e) {
    return set_error(static_cast<elb_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(ELB_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(ELB_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(ELB_ERR_INTERNAL, "unknown exception");
  }
}

template <class... P>
void need(const char* fn, P... ptrs) {
  if (((ptrs == nullptr) || ...))
    fail(ErrorCode::precondition, std::string(fn) + ": null argument");
}

GridSpec to_spec(const elb_grid* g) {
  GridSpec s;
  s.nx = g->nx;
  s.ny = g->ny;
  s.hx = g->hx;
  s.hy = g->hy;
  s.origin = {g->ox, g->oy};
  s.validate();
  return s;
}

elb_grid from_spec(const GridSpec& s) {
  return {s.nx, s.ny, s.hx, s.hy, s.origin.x, s.origin.y};
}

elb_trace_entry to_c(const TraceEntry& t) {
  return {t.restart,   t.stage,  t.iteration, t.eps,       t.delta,
          t.concave,   t.dirichlet, t.energy, t.objective, t.step,
          t.grad_norm, t.div_residual, t.mass};
}

}  // namespace

extern "C" {

const char* elb_last_error(void) { return g_last_error.c_str(); }

const char* elb_status_name(elb_status s) {
  switch (s) {
    case ELB_OK: return "ok";
    case ELB_ERR_DOMAIN: return "domain";
    case ELB_ERR_COMPATIBILITY: return "compatibility";
    case ELB_ERR_NUMERIC: return "numeric";
    case ELB_ERR_GEOMETRY: return "geometry";
    case ELB_ERR_RESOLUTION: return "resolution";
    case ELB_ERR_DIMENSION: return "dimension";
    case ELB_ERR_IO: return "io";
    case ELB_ERR_FORMAT: return "format";
    case ELB_ERR_PRECONDITION: return "precondition";
    case ELB_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* elb_version(void) { return kVersion; }

elb_status elb_grid_make(int nx, int ny, double x0, double y0, double x1, double y1,
                         elb_grid* out) {
  return guarded([&] {
    need("elb_grid_make", out);
    *out = from_spec(make_grid(nx, ny, x0, y0, x1, y1));
  });
}

elb_status elb_exponents(double alpha, int d, elb_exponent_set* out) {
  return guarded([&] {
    need("elb_exponents", out);
    const ExponentSet e = exponents(alpha, d);
    *out = {e.alpha, e.d, e.beta, e.gamma1, e.gamma2};
  });
}

elb_status elb_profile_constants_compute(double alpha, double tol, elb_profile_constants* out) {
  return guarded([&] {
    need("elb_profile_constants_compute", out);
    const ProfileConstants pc = tol > 0 ? profile_constants(alpha, tol) : profile_constants(alpha);
    *out = {pc.alpha, pc.beta, pc.c0, pc.C0, pc.c, pc.c0_error, pc.C0_error};
  });
}

elb_status elb_optimal_amplitude(double m, double eps, double alpha, double* out) {
  return guarded([&] {
    need("elb_optimal_amplitude", out);
    *out = optimal_amplitude(m, eps, alpha);
  });
}

elb_status elb_pointwise_cost(double m, double eps, double alpha, double* out) {
  return guarded([&] {
    need("elb_pointwise_cost", out);
    *out = pointwise_cost(m, eps, alpha);
  });
}

elb_status elb_field_create(const elb_grid* grid, elb_field** out) {
  return guarded([&] {
    need("elb_field_create", grid, out);
    *out = new elb_field{VectorField2D(to_spec(grid))};
  });
}

void elb_field_free(elb_field* f) { delete f; }

elb_status elb_field_grid(const elb_field* f, elb_grid* out) {
  return guarded([&] {
    need("elb_field_grid", f, out);
    *out = from_spec(f->u.spec());
  });
}

elb_status elb_field_data(elb_field* f, double** ux, size_t* n_ux, double** uy, size_t* n_uy) {
  return guarded([&] {
    need("elb_field_data", f, ux, n_ux, uy, n_uy);
    *ux = f->u.ux_values().data();
    *n_ux = f->u.ux_values().size();
    *uy = f->u.uy_values().data();
    *n_uy = f->u.uy_values().size();
  });
}

elb_status elb_field_read_btf(const char* path, elb_field** out) {
  return guarded([&] {
    need("elb_field_read_btf", path, out);
    *out = new elb_field{read_btf_vector(path)};
  });
}

elb_status elb_field_write_btf(const elb_field* f, const char* path) {
  return guarded([&] {
    need("elb_field_write_btf", f, path);
    write_btf(path, f->u);
  });
}

elb_status elb_field_write_csv(const elb_field* f, const char* path) {
  return guarded([&] {
    need("elb_field_write_csv", f, path);
    write_csv(path, f->u);
  });
}

elb_status elb_field_write_norm_pgm(const elb_field* f, const char* path) {
  return guarded([&] {
    need("elb_field_write_norm_pgm", f, path);
    const GridSpec& g = f->u.spec();
    ScalarField2D n(g);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const Point v = f->u.cell_value(i, j);
        n(i, j) = std::hypot(v.x, v.y);
      }
    write_pgm(path, n);
  });
}

elb_status elb_field_write_divergence_btf(const elb_field* f, const char* path) {
  return guarded([&] {
    need("elb_field_write_divergence_btf", f, path);
    write_btf(path, divergence(f->u));
  });
}

elb_status elb_field_mass(const elb_field* f, double* out) {
  return guarded([&] {
    need("elb_field_mass", f, out);
    *out = field_mass(f->u);
  });
}

elb_status elb_energy(const elb_field* u, double alpha, double eps, double delta,
                      elb_energy_terms* out) {
  return guarded([&] {
    need("elb_energy", u, out);
    double c = 0, d = 0;
    const double t = energy_total(u->u, make_energy_params(alpha, eps, delta), &c, &d);
    *out = {c, d, t};
  });
}

elb_status elb_energy_gradient_psi(const elb_grid* grid, const double* psi, const double* phi,
                                   double alpha, double eps, double delta, double* out) {
  return guarded([&] {
    need("elb_energy_gradient_psi", grid, psi, out);
    const GridSpec s = to_spec(grid);
    ScalarField2D ps(s, Location::nodes);
    std::memcpy(ps.values().data(), psi, ps.size() * sizeof(double));
    ScalarField2D ph(s, Location::cells);
    if (phi) std::memcpy(ph.values().data(), phi, ph.size() * sizeof(double));
    const ScalarField2D g = energy_gradient_psi(ps, ph, make_energy_params(alpha, eps, delta));
    std::memcpy(out, g.values().data(), g.size() * sizeof(double));
  });
}

elb_status elb_slice(const elb_field* u, double alpha, double eps, elb_axis axis, double x0,
                     double y0, double x1, double y1, elb_slice_report* out) {
  return guarded([&] {
    need("elb_slice", u, out);
    const SliceReport r = slice_report(u->u, make_energy_params(alpha, eps, 0.0),
                                       axis == ELB_AXIS_X ? Axis::x : Axis::y,
                                       Window{x0, y0, x1, y1});
    *out = {r.bound, r.window_energy, r.ratio, r.total_variation};
  });
}

elb_status elb_graph_create(elb_graph** out) {
  return guarded([&] {
    need("elb_graph_create", out);
    *out = new elb_graph{};
  });
}

elb_status elb_graph_read(const char* path, elb_graph** out) {
  return guarded([&] {
    need("elb_graph_read", path, out);
    *out = new elb_graph{read_graph(path)};
  });
}

void elb_graph_free(elb_graph* g) { delete g; }

elb_status elb_graph_add_edge(elb_graph* g, double x0, double y0, double x1, double y1,
                              double w) {
  return guarded([&] {
    need("elb_graph_add_edge", g);
    WeightedGraph one{{Edge{{x0, y0}, {x1, y1}, w}}};
    one.validate();
    g->g.edges.push_back(one.edges.front());
  });
}

elb_status elb_graph_edge_count(const elb_graph* g, size_t* out) {
  return guarded([&] {
    need("elb_graph_edge_count", g, out);
    *out = g->g.edges.size();
  });
}

elb_status elb_graph_edge(const elb_graph* g, size_t i, double* x0, double* y0, double* x1,
                          double* y1, double* w) {
  return guarded([&] {
    need("elb_graph_edge", g, x0, y0, x1, y1, w);
    require(i < g->g.edges.size(), ErrorCode::dimension, "edge index out of range");
    const Edge& e = g->g.edges[i];
    *x0 = e.p0.x;
    *y0 = e.p0.y;
    *x1 = e.p1.x;
    *y1 = e.p1.y;
    *w = e.w;
  });
}

elb_status elb_graph_write(const elb_graph* g, const char* path) {
  return guarded([&] {
    need("elb_graph_write", g, path);
    write_graph(path, g->g);
  });
}

elb_status elb_graph_energy(const elb_graph* g, double alpha, double* out) {
  return guarded([&] {
    need("elb_graph_energy", g, out);
    *out = graph_energy(g->g, alpha);
  });
}

elb_status elb_measure_create(elb_measure** out) {
  return guarded([&] {
    need("elb_measure_create", out);
    *out = new elb_measure{};
  });
}

elb_status elb_measure_read(const char* path, elb_measure** out) {
  return guarded([&] {
    need("elb_measure_read", path, out);
    *out = new elb_measure{read_measure(path)};
  });
}

void elb_measure_free(elb_measure* m) { delete m; }

elb_status elb_measure_add_atom(elb_measure* m, double x, double y, double mass) {
  return guarded([&] {
    need("elb_measure_add_atom", m);
    require(std::isfinite(x) && std::isfinite(y) && std::isfinite(mass), ErrorCode::domain,
            "atom coordinates and mass must be finite");
    m->m.atoms.push_back({{x, y}, mass});
  });
}

elb_status elb_measure_size(const elb_measure* m, size_t* out) {
  return guarded([&] {
    need("elb_measure_size", m, out);
    *out = m->m.atoms.size();
  });
}

elb_status elb_measure_atom(const elb_measure* m, size_t i, double* x, double* y, double* mass) {
  return guarded([&] {
    need("elb_measure_atom", m, x, y, mass);
    require(i < m->m.atoms.size(), ErrorCode::dimension, "atom index out of range");
    const Atom& a = m->m.atoms[i];
    *x = a.p.x;
    *y = a.p.y;
    *mass = a.mass;
  });
}

elb_status elb_measure_total(const elb_measure* m, double* out) {
  return guarded([&] {
    need("elb_measure_total", m, out);
    *out = m->m.total();
  });
}

elb_status elb_measure_write(const elb_measure* m, const char* path) {
  return guarded([&] {
    need("elb_measure_write", m, path);
    write_measure(path, m->m);
  });
}

elb_status elb_w1(const elb_measure* mu, const elb_measure* nu, double* out) {
  return guarded([&] {
    need("elb_w1", mu, nu, out);
    *out = w1_distance(mu->m, nu->m);
  });
}

elb_status elb_measure1d_create(elb_measure1d** out) {
  return guarded([&] {
    need("elb_measure1d_create", out);
    *out = new elb_measure1d{};
  });
}

elb_status elb_measure1d_read(const char* path, elb_measure1d** out) {
  return guarded([&] {
    need("elb_measure1d_read", path, out);
    *out = new elb_measure1d{read_measure1d(path)};
  });
}

void elb_measure1d_free(elb_measure1d* m) { delete m; }

elb_status elb_measure1d_add_atom(elb_measure1d* m, double x, double mass) {
  return guarded([&] {
    need("elb_measure1d_add_atom", m);
    m->m.atoms.emplace_back(x, mass);
  });
}

elb_status elb_measure1d_set_density(elb_measure1d* m, const double* values, size_t n) {
  return guarded([&] {
    need("elb_measure1d_set_density", m);
    require(n == 0 || values, ErrorCode::precondition, "density values are null");
    m->m.density.assign(values, values + n);
  });
}

elb_status elb_galpha(const elb_measure1d* m, double alpha, int n_max, double* out,
                      double* levels) {
  return guarded([&] {
    need("elb_galpha", m, out);
    const std::vector<double> s = galpha_levels(m->m, alpha, n_max);
    double best = 0;
    for (double v : s) best = std::max(best, v);
    if (levels) std::memcpy(levels, s.data(), s.size() * sizeof(double));
    *out = best;
  });
}

elb_status elb_profile_solve(double alpha, double theta, double eps, int n_samples,
                             elb_profile** out) {
  return guarded([&] {
    need("elb_profile_solve", out);
    *out = new elb_profile{n_samples > 0 ? solve_profile(alpha, theta, eps, n_samples)
                                         : solve_profile(alpha, theta, eps)};
  });
}

void elb_profile_free(elb_profile* p) { delete p; }

elb_status elb_profile_get_info(const elb_profile* p, elb_profile_info* out) {
  return guarded([&] {
    need("elb_profile_get_info", p, out);
    const TransverseProfile& t = p->p;
    *out = {t.alpha,         t.beta,           t.theta, t.eps,
            t.amplitude,     t.kappa,          t.plateau_halfwidth,
            t.T,             t.mass_integral,  t.first_moment,
            t.support_halfwidth};
  });
}

elb_status elb_profile_intensity(const elb_profile* p, double s, double* out) {
  return guarded([&] {
    need("elb_profile_intensity", p, out);
    *out = p->p.intensity(s);
  });
}

elb_status elb_profile_write_csv(const elb_profile* p, const char* path) {
  return guarded([&] {
    need("elb_profile_write_csv", p, path);
    write_profile_csv(path, p->p);
  });
}

elb_status elb_synthesize(const elb_graph* g, double alpha, double eps, const elb_grid* grid,
                          int correct_nodes, double ball_factor, elb_synthesis** out) {
  return guarded([&] {
    need("elb_synthesize", g, grid, out);
    SynthesisResult s = ball_factor > 0
                            ? synthesize_graph(g->g, alpha, eps, to_spec(grid), correct_nodes != 0,
                                               ball_factor)
                            : synthesize_graph(g->g, alpha, eps, to_spec(grid), correct_nodes != 0);
    auto* h = new elb_synthesis{};
    h->field.u = s.u;
    h->s = std::move(s);
    *out = h;
  });
}

void elb_synthesis_free(elb_synthesis* s) { delete s; }

elb_status elb_synthesis_field(const elb_synthesis* s, const elb_field** out) {
  return guarded([&] {
    need("elb_synthesis_field", s, out);
    *out = &s->field;
  });
}

elb_status elb_synthesis_node_count(const elb_synthesis* s, size_t* out) {
  return guarded([&] {
    need("elb_synthesis_node_count", s, out);
    *out = s->s.nodes.size();
  });
}

elb_status elb_synthesis_node(const elb_synthesis* s, size_t i, elb_node_report* out) {
  return guarded([&] {
    need("elb_synthesis_node", s, out);
    require(i < s->s.nodes.size(), ErrorCode::dimension, "node index out of range");
    const NodeReport& n = s->s.nodes[i];
    *out = {n.p.x,           n.p.y,          n.degree,           n.imbalance,
            n.ball_radius,   n.residual_before, n.residual_after, n.correction_energy,
            n.corrected ? 1 : 0};
  });
}

elb_status elb_synthesis_warning_count(const elb_synthesis* s, size_t* out) {
  return guarded([&] {
    need("elb_synthesis_warning_count", s, out);
    *out = s->s.warnings.size();
  });
}

const char* elb_synthesis_warning(const elb_synthesis* s, size_t i) {
  if (!s || i >= s->s.warnings.size()) return nullptr;
  return s->s.warnings[i].c_str();
}

elb_status elb_config_create(elb_config** out) {
  return guarded([&] {
    need("elb_config_create", out);
    auto* c = new elb_config{};
    c->c.grid = make_grid(128, 128, 0, 0, 1, 1);
    c->c.eps_schedule = continuation_schedule(0.08, 0.01, 4);
    *out = c;
  });
}

elb_status elb_config_read(const char* path, elb_config** out) {
  return guarded([&] {
    need("elb_config_read", path, out);
    const ConfigMap m = read_config(path);
    auto c = std::make_unique<elb_config>();
    c->c.grid = make_grid(128, 128, 0, 0, 1, 1);
    c->c.eps_schedule = continuation_schedule(0.08, 0.01, 4);
    apply_config(m, c->c);
    c->c.validate();
    *out = c.release();
  });
}

void elb_config_free(elb_config* c) { delete c; }

elb_status elb_config_set(elb_config* c, const char* key, const char* value) {
  return guarded([&] {
    need("elb_config_set", c, key, value);
    SolverConfig next = c->c;
    apply_config({{key, value}}, next);
    c->c = std::move(next);
  });
}

const char* elb_config_text(elb_config* c) {
  if (!c) return "";
  c->text = config_to_text(c->c);
  return c->text.c_str();
}

elb_status elb_solve(const elb_config* c, const elb_measure* fplus, const elb_measure* fminus,
                     elb_trace_fn on_iterate, void* user, elb_result** out) {
  return guarded([&] {
    need("elb_solve", c, fplus, fminus, out);
    TraceCallback cb;
    if (on_iterate)
      cb = [on_iterate, user](const TraceEntry& t) {
        const elb_trace_entry e = to_c(t);
        on_iterate(&e, user);
      };
    auto r = std::make_unique<elb_result>();
    r->r = solve(c->c, fplus->m, fminus->m, cb);
    r->cfg = c->c;
    r->field.u = r->r.u;
    *out = r.release();
  });
}

void elb_result_free(elb_result* r) { delete r; }

elb_status elb_result_summary(const elb_result* r, elb_solve_summary* out) {
  return guarded([&] {
    need("elb_result_summary", r, out);
    const SolveResult& s = r->r;
    *out = {s.final_energy_delta0.concave_term,
            s.final_energy_delta0.dirichlet_term,
            s.final_energy_delta0.total,
            s.final_energy.concave_term,
            s.final_energy.dirichlet_term,
            s.final_energy.total,
            s.div_residual,
            s.mass,
            s.mass_feasible ? 1 : 0,
            s.converged ? 1 : 0,
            s.best_restart,
            static_cast<int>(s.restart_objectives.size())};
  });
}

elb_status elb_result_field(const elb_result* r, const elb_field** out) {
  return guarded([&] {
    need("elb_result_field", r, out);
    *out = &r->field;
  });
}

elb_status elb_result_trace_count(const elb_result* r, size_t* out) {
  return guarded([&] {
    need("elb_result_trace_count", r, out);
    *out = r->r.energy_trace.size();
  });
}

elb_status elb_result_trace(const elb_result* r, size_t i, elb_trace_entry* out) {
  return guarded([&] {
    need("elb_result_trace", r, out);
    require(i < r->r.energy_trace.size(), ErrorCode::dimension, "trace index out of range");
    *out = to_c(r->r.energy_trace[i]);
  });
}

elb_status elb_result_stage_count(const elb_result* r, size_t* out) {
  return guarded([&] {
    need("elb_result_stage_count", r, out);
    *out = r->r.stages.size();
  });
}

elb_status elb_result_stage(const elb_result* r, size_t i, elb_stage_summary* out) {
  return guarded([&] {
    need("elb_result_stage", r, out);
    require(i < r->r.stages.size(), ErrorCode::dimension, "stage index out of range");
    const StageSummary& s = r->r.stages[i];
    *out = {s.eps,       s.delta,     s.sigma,          s.iterations,
            s.accepted,  s.objective, s.grad_norm,      s.failed ? 1 : 0};
  });
}

const char* elb_result_stage_message(const elb_result* r, size_t i) {
  if (!r || i >= r->r.stages.size()) return nullptr;
  return r->r.stages[i].message.c_str();
}

elb_status elb_result_write_trace_csv(const elb_result* r, const char* path) {
  return guarded([&] {
    need("elb_result_write_trace_csv", r, path);
    write_trace_csv(path, r->r.energy_trace);
  });
}

const char* elb_result_report(elb_result* r) {
  if (!r) return "";
  const elb_status s = guarded([&] { r->report = format_report(run_report(r->r, r->cfg)); });
  if (s != ELB_OK) r->report.clear();
  return r->report.c_str();
}

elb_status elb_write_manifest(const char* dir, const char* command, const char* config_text,
                              const char* const* inputs, size_t n_inputs,
                              const char* const* outputs, size_t n_outputs,
                              double wall_clock_seconds) {
  return guarded([&] {
    need("elb_write_manifest", dir, command);
    require(n_inputs == 0 || inputs, ErrorCode::precondition, "inputs are null");
    require(n_outputs == 0 || outputs, ErrorCode::precondition, "outputs are null");
    RunManifest m;
    m.command = command;
    m.config = config_text ? config_text : "";
    m.wall_clock_seconds = wall_clock_seconds;
    for (size_t k = 0; k < n_inputs; ++k) m.inputs.emplace_back(inputs[k], file_digest(inputs[k]));
    std::vector<std::string> outs(outputs, outputs + n_outputs);
    write_manifest(dir, std::move(m), outs);
  });
}

elb_status elb_file_digest(const char* path, unsigned long long* out) {
  return guarded([&] {
    need("elb_file_digest", path, out);
    *out = file_digest(path);
  });
}

}  // extern "C"
