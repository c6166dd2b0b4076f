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

// Command-line front end. Links only the C interface.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "elbranch/elbranch.h"

namespace fs = std::filesystem;

namespace {

// Exit codes: 0 success, 1 usage or bad parameter, 2 unreadable or malformed
// input, 3 numeric failure.
int exit_code(elb_status s) {
  switch (s) {
    case ELB_OK: return 0;
    case ELB_ERR_DOMAIN:
    case ELB_ERR_PRECONDITION:
    case ELB_ERR_DIMENSION: return 1;
    case ELB_ERR_FORMAT:
    case ELB_ERR_IO:
    case ELB_ERR_COMPATIBILITY: return 2;
    default: return 3;
  }
}

struct Failure {
  elb_status status;
};

void check(elb_status s) {
  if (s != ELB_OK) throw Failure{s};
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
  T** out() { return &p; }
  operator T*() const { return p; }
};
using Graph = Handle<elb_graph, elb_graph_free>;
using Measure = Handle<elb_measure, elb_measure_free>;
using Measure1D = Handle<elb_measure1d, elb_measure1d_free>;
using Field = Handle<elb_field, elb_field_free>;
using Profile = Handle<elb_profile, elb_profile_free>;
using Synthesis = Handle<elb_synthesis, elb_synthesis_free>;
using Config = Handle<elb_config, elb_config_free>;
using Result = Handle<elb_result, elb_result_free>;

void make_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    std::fprintf(stderr, "error: cannot create %s: %s\n", dir.c_str(), ec.message().c_str());
    throw Failure{ELB_ERR_IO};
  }
}

std::string join(const std::string& dir, const char* name) {
  return (fs::path(dir) / name).string();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int run_constants(double alpha, int d) {
  elb_exponent_set e;
  check(elb_exponents(alpha, d, &e));
  std::string line = "alpha=" + fmt(e.alpha) + ",d=" + std::to_string(e.d) +
                     ",beta=" + fmt(e.beta) + ",gamma1=" + fmt(e.gamma1) +
                     ",gamma2=" + fmt(e.gamma2);
  if (d == 2) {
    elb_profile_constants pc;
    check(elb_profile_constants_compute(alpha, 0, &pc));
    line += ",c0=" + fmt(pc.c0) + ",C0=" + fmt(pc.C0) + ",c=" + fmt(pc.c);
  }
  std::printf("%s\n", line.c_str());
  return 0;
}

int run_profile(double alpha, double theta, double eps, int samples, const std::string& out) {
  Profile p;
  check(elb_profile_solve(alpha, theta, eps, samples, p.out()));
  if (const fs::path parent = fs::path(out).parent_path(); !parent.empty()) make_dir(parent.string());
  check(elb_profile_write_csv(p, out.c_str()));
  elb_profile_info info;
  check(elb_profile_get_info(p, &info));
  std::printf("amplitude=%s,kappa=%s,plateau_halfwidth=%s,T=%s,support_halfwidth=%s\n",
              fmt(info.amplitude).c_str(), fmt(info.kappa).c_str(),
              fmt(info.plateau_halfwidth).c_str(), fmt(info.T).c_str(),
              fmt(info.support_halfwidth).c_str());
  return 0;
}

struct SynthArgs {
  std::string graph, out;
  double alpha = 0.8, eps = 0.01;
  std::vector<int> grid{256, 256};
  std::vector<double> domain;
  bool no_correction = false;
  double ball_factor = 0;
};

int run_synthesize(const SynthArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  Graph g;
  check(elb_graph_read(a.graph.c_str(), g.out()));
  size_t n_edges = 0;
  check(elb_graph_edge_count(g, &n_edges));
  if (n_edges == 0) {
    std::fprintf(stderr, "error: %s has no edges\n", a.graph.c_str());
    return 2;
  }
  std::vector<double> box = a.domain;
  if (box.empty()) {
    // Bounding box of the graph padded by a quarter of its larger side.
    double x0 = INFINITY, y0 = INFINITY, x1 = -INFINITY, y1 = -INFINITY;
    for (size_t k = 0; k < n_edges; ++k) {
      double ax, ay, bx, by, w;
      check(elb_graph_edge(g, k, &ax, &ay, &bx, &by, &w));
      x0 = std::min({x0, ax, bx});
      x1 = std::max({x1, ax, bx});
      y0 = std::min({y0, ay, by});
      y1 = std::max({y1, ay, by});
    }
    const double pad = 0.25 * std::max(x1 - x0, y1 - y0);
    box = {x0 - pad, y0 - pad, x1 + pad, y1 + pad};
  }
  elb_grid grid;
  check(elb_grid_make(a.grid[0], a.grid[1], box[0], box[1], box[2], box[3], &grid));
  Synthesis s;
  check(elb_synthesize(g, a.alpha, a.eps, &grid, a.no_correction ? 0 : 1, a.ball_factor,
                       s.out()));
  const elb_field* u = nullptr;
  check(elb_synthesis_field(s, &u));

  make_dir(a.out);
  check(elb_field_write_btf(u, join(a.out, "field.btf").c_str()));
  check(elb_field_write_divergence_btf(u, join(a.out, "divergence.btf").c_str()));
  check(elb_field_write_norm_pgm(u, join(a.out, "field_norm.pgm").c_str()));

  elb_energy_terms e;
  check(elb_energy(u, a.alpha, a.eps, 0.0, &e));
  double graph_e = 0;
  check(elb_graph_energy(g, a.alpha, &graph_e));
  elb_profile_constants pc;
  check(elb_profile_constants_compute(a.alpha, 0, &pc));

  std::string nodes = "x,y,degree,imbalance,ball_radius,residual_before,residual_after,"
                      "correction_energy,corrected\n";
  size_t n_nodes = 0;
  check(elb_synthesis_node_count(s, &n_nodes));
  for (size_t k = 0; k < n_nodes; ++k) {
    elb_node_report r;
    check(elb_synthesis_node(s, k, &r));
    nodes += fmt(r.x) + "," + fmt(r.y) + "," + std::to_string(r.degree) + "," +
             fmt(r.imbalance) + "," + fmt(r.ball_radius) + "," + fmt(r.residual_before) + "," +
             fmt(r.residual_after) + "," + fmt(r.correction_energy) + "," +
             std::to_string(r.corrected) + "\n";
  }
  std::ofstream(join(a.out, "nodes.csv")) << nodes;

  std::string report = "concave term     " + fmt(e.concave) + "\ndirichlet term   " +
                       fmt(e.dirichlet) + "\nenergy           " + fmt(e.total) +
                       "\ngraph energy     " + fmt(graph_e) + "\nc                " +
                       fmt(pc.c) + "\nratio            " + fmt(e.total / (pc.c * graph_e)) + "\n";
  size_t n_warn = 0;
  check(elb_synthesis_warning_count(s, &n_warn));
  for (size_t k = 0; k < n_warn; ++k) {
    report += std::string("warning: ") + elb_synthesis_warning(s, k) + "\n";
    std::fprintf(stderr, "warning: %s\n", elb_synthesis_warning(s, k));
  }
  std::ofstream(join(a.out, "report.txt")) << report;

  const std::string cfg = "alpha = " + fmt(a.alpha) + "\neps = " + fmt(a.eps) +
                          "\nnx = " + std::to_string(a.grid[0]) +
                          "\nny = " + std::to_string(a.grid[1]) + "\nx0 = " + fmt(box[0]) +
                          "\ny0 = " + fmt(box[1]) + "\nx1 = " + fmt(box[2]) +
                          "\ny1 = " + fmt(box[3]) + "\nnode_correction = " +
                          (a.no_correction ? "false" : "true") + "\n";
  const char* inputs[] = {a.graph.c_str()};
  const char* outputs[] = {"field.btf", "divergence.btf", "field_norm.pgm", "field_norm.pgm.txt",
                           "nodes.csv", "report.txt"};
  check(elb_write_manifest(a.out.c_str(), "synthesize", cfg.c_str(), inputs, 1, outputs,
                           std::size(outputs), seconds_since(t0)));
  std::fputs(report.c_str(), stdout);
  return 0;
}

int run_energy(const std::string& field, double alpha, double eps, double delta) {
  Field u;
  check(elb_field_read_btf(field.c_str(), u.out()));
  elb_energy_terms e;
  check(elb_energy(u, alpha, eps, delta, &e));
  double mass = 0;
  check(elb_field_mass(u, &mass));
  std::printf("concave=%s,dirichlet=%s,total=%s,mass=%s\n", fmt(e.concave).c_str(),
              fmt(e.dirichlet).c_str(), fmt(e.total).c_str(), fmt(mass).c_str());
  return 0;
}

struct SolveArgs {
  std::string config, fplus, fminus, out;
  std::vector<std::string> overrides;
  bool verbose = false;
};

void print_trace(const elb_trace_entry* t, void*) {
  if (t->iteration % 10 == 0)
    std::fprintf(stderr, "restart %d stage %d iter %d eps %.4g energy %.10g div %.3g\n",
                 t->restart, t->stage, t->iteration, t->eps, t->energy, t->div_residual);
}

int run_solve(const SolveArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  Config cfg;
  check(elb_config_read(a.config.c_str(), cfg.out()));
  for (const std::string& kv : a.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "error: --set expects key=value, got '%s'\n", kv.c_str());
      return 1;
    }
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t") + 1);
      return s;
    };
    check(elb_config_set(cfg, trim(kv.substr(0, eq)).c_str(), trim(kv.substr(eq + 1)).c_str()));
  }
  Measure fp, fm;
  check(elb_measure_read(a.fplus.c_str(), fp.out()));
  check(elb_measure_read(a.fminus.c_str(), fm.out()));

  Result r;
  check(elb_solve(cfg, fp, fm, a.verbose ? print_trace : nullptr, nullptr, r.out()));
  const elb_field* u = nullptr;
  check(elb_result_field(r, &u));

  make_dir(a.out);
  const std::string cfg_text = elb_config_text(cfg);
  std::ofstream(join(a.out, "config.txt")) << cfg_text;
  check(elb_field_write_btf(u, join(a.out, "field.btf").c_str()));
  check(elb_field_write_divergence_btf(u, join(a.out, "divergence.btf").c_str()));
  check(elb_field_write_norm_pgm(u, join(a.out, "field_norm.pgm").c_str()));
  check(elb_result_write_trace_csv(r, join(a.out, "trace.csv").c_str()));
  const std::string report = elb_result_report(r);
  std::ofstream(join(a.out, "report.txt")) << report;

  const char* inputs[] = {a.config.c_str(), a.fplus.c_str(), a.fminus.c_str()};
  const char* outputs[] = {"config.txt",         "field.btf", "divergence.btf", "field_norm.pgm",
                           "field_norm.pgm.txt", "trace.csv", "report.txt"};
  check(elb_write_manifest(a.out.c_str(), "solve", cfg_text.c_str(), inputs, std::size(inputs),
                           outputs, std::size(outputs), seconds_since(t0)));
  std::fputs(report.c_str(), stdout);

  size_t n_stages = 0;
  check(elb_result_stage_count(r, &n_stages));
  for (size_t k = 0; k < n_stages; ++k) {
    elb_stage_summary st;
    check(elb_result_stage(r, k, &st));
    const char* msg = elb_result_stage_message(r, k);
    if (st.failed || (msg && *msg))
      std::fprintf(stderr, "stage %zu (eps %.4g): %s%s\n", k, st.eps,
                   st.failed ? "failed: " : "", msg ? msg : "");
  }
  return 0;
}

int run_galpha(const std::string& path, double alpha, int nmax, bool levels) {
  Measure1D m;
  check(elb_measure1d_read(path.c_str(), m.out()));
  std::vector<double> lv(static_cast<size_t>(std::max(nmax, 0)) + 1);
  double v = 0;
  check(elb_galpha(m, alpha, nmax, &v, lv.data()));
  if (levels)
    for (int n = 0; n <= nmax; ++n) std::printf("level=%d,sum=%s\n", n, fmt(lv[n]).c_str());
  std::printf("%s\n", fmt(v).c_str());
  return 0;
}

int run_w1(const std::string& mu_path, const std::string& nu_path) {
  Measure mu, nu;
  check(elb_measure_read(mu_path.c_str(), mu.out()));
  check(elb_measure_read(nu_path.c_str(), nu.out()));
  double d = 0;
  check(elb_w1(mu, nu, &d));
  std::printf("%s\n", fmt(d).c_str());
  return 0;
}

int run_compare(const std::string& graph, const std::string& field, double alpha, double eps) {
  Graph g;
  check(elb_graph_read(graph.c_str(), g.out()));
  Field u;
  check(elb_field_read_btf(field.c_str(), u.out()));
  elb_energy_terms e;
  check(elb_energy(u, alpha, eps, 0.0, &e));
  double ge = 0;
  check(elb_graph_energy(g, alpha, &ge));
  elb_profile_constants pc;
  check(elb_profile_constants_compute(alpha, 0, &pc));
  if (!(ge > 0)) {
    std::fprintf(stderr, "error: graph energy is zero\n");
    return 2;
  }
  std::printf("field_energy=%s,graph_energy=%s,c=%s,ratio=%s\n", fmt(e.total).c_str(),
              fmt(ge).c_str(), fmt(pc.c).c_str(), fmt(e.total / (pc.c * ge)).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Branched transport by elliptic approximation"};
  app.set_version_flag("--version", std::string(elb_version()));
  app.require_subcommand(1);

  double alpha = 0.8, eps = 0.01, theta = 1.0, delta = 0.0;
  int d = 2, samples = 0, nmax = 20;
  std::string out, field, graph, measure, mu, nu;
  bool levels = false;

  auto* c_const = app.add_subcommand("constants", "Print exponents and profile constants");
  c_const->add_option("--alpha", alpha, "Transport exponent")->required();
  c_const->add_option("--d", d, "Dimension")->capture_default_str();

  auto* c_prof = app.add_subcommand("profile", "Write a transverse profile table");
  c_prof->add_option("--alpha", alpha)->required();
  c_prof->add_option("--theta", theta, "Flux carried by the strip")->required();
  c_prof->add_option("--eps", eps)->required();
  c_prof->add_option("--samples", samples, "Table size (0: default)");
  c_prof->add_option("-o,--output", out, "CSV output file")->required();

  SynthArgs sa;
  auto* c_syn = app.add_subcommand("synthesize", "Build a field from a weighted graph");
  c_syn->add_option("--graph", sa.graph)->required()->check(CLI::ExistingFile);
  c_syn->add_option("--alpha", sa.alpha)->required();
  c_syn->add_option("--eps", sa.eps)->required();
  c_syn->add_option("--grid", sa.grid, "Cells NX NY")->expected(2)->required();
  c_syn->add_option("--domain", sa.domain, "X0 Y0 X1 Y1 (default: padded bounding box)")
      ->expected(4);
  c_syn->add_option("--ball-factor", sa.ball_factor, "Node ball radius / support halfwidth");
  c_syn->add_flag("--no-node-correction", sa.no_correction);
  c_syn->add_option("--out", sa.out, "Output directory")->required();

  auto* c_en = app.add_subcommand("energy", "Evaluate the energy of a stored field");
  c_en->add_option("--field", field)->required()->check(CLI::ExistingFile);
  c_en->add_option("--alpha", alpha)->required();
  c_en->add_option("--eps", eps)->required();
  c_en->add_option("--delta", delta)->capture_default_str();

  SolveArgs so;
  auto* c_solve = app.add_subcommand("solve", "Minimize the energy by continuation in eps");
  c_solve->add_option("--config", so.config)->required()->check(CLI::ExistingFile);
  c_solve->add_option("--fplus", so.fplus, "Source atoms")->required()->check(CLI::ExistingFile);
  c_solve->add_option("--fminus", so.fminus, "Sink atoms")->required()->check(CLI::ExistingFile);
  c_solve->add_option("--out", so.out, "Output directory")->required();
  c_solve->add_option("--set", so.overrides, "Override a config key (key=value)");
  c_solve->add_flag("-v,--verbose", so.verbose, "Log iterations to stderr");

  auto* c_ga = app.add_subcommand("galpha", "Dyadic functional of a measure on [0, 1)");
  c_ga->add_option("--measure", measure)->required()->check(CLI::ExistingFile);
  c_ga->add_option("--alpha", alpha)->required();
  c_ga->add_option("--nmax", nmax)->required();
  c_ga->add_flag("--levels", levels, "Also print every level sum");

  auto* c_w1 = app.add_subcommand("w1", "Wasserstein-1 distance between atomic measures");
  c_w1->add_option("--mu", mu)->required()->check(CLI::ExistingFile);
  c_w1->add_option("--nu", nu)->required()->check(CLI::ExistingFile);

  auto* c_cmp = app.add_subcommand("compare", "Field energy over c times graph energy");
  c_cmp->add_option("--graph", graph)->required()->check(CLI::ExistingFile);
  c_cmp->add_option("--field", field)->required()->check(CLI::ExistingFile);
  c_cmp->add_option("--alpha", alpha)->required();
  c_cmp->add_option("--eps", eps)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*c_const) return run_constants(alpha, d);
    if (*c_prof) return run_profile(alpha, theta, eps, samples, out);
    if (*c_syn) return run_synthesize(sa);
    if (*c_en) return run_energy(field, alpha, eps, delta);
    if (*c_solve) return run_solve(so);
    if (*c_ga) return run_galpha(measure, alpha, nmax, levels);
    if (*c_w1) return run_w1(mu, nu);
    if (*c_cmp) return run_compare(graph, field, alpha, eps);
  } catch (const Failure& f) {
    if (f.status != ELB_OK && *elb_last_error())
      std::fprintf(stderr, "error (%s): %s\n", elb_status_name(f.status), elb_last_error());
    return exit_code(f.status);
  }
  return 1;
}
