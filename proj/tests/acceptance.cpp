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

// Acceptance checks. Usage: acceptance [criterion ...]; no arguments runs all
// twelve. Prints one PASS/FAIL line per criterion and exits nonzero if any
// requested criterion fails (including its runtime budget).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "elbranch/constants.hpp"
#include "elbranch/diagnostics.hpp"
#include "elbranch/energy.hpp"
#include "elbranch/error.hpp"
#include "elbranch/measures.hpp"
#include "elbranch/profile.hpp"
#include "elbranch/solver.hpp"
#include "oracles.hpp"

using namespace elbranch;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const double kAlpha = 0.8;

// ---- 1: profile constant identity as stated: c0 = C0 (1 - beta) / (2 - beta)
Outcome criterion1() {
  double worst_stated = 0, worst_plus = 0;
  std::string per;
  for (double a : {0.6, 0.7, 0.8, 0.9}) {
    const ProfileConstants pc = profile_constants(a);
    const double stated = std::abs(pc.c0 - pc.C0 * (1 - pc.beta) / (2 - pc.beta));
    const double plus = std::abs(pc.c0 - pc.C0 * (1 - pc.beta) / (2 + pc.beta));
    worst_stated = std::max(worst_stated, stated);
    worst_plus = std::max(worst_plus, plus);
    per += fmt(" a=%.1f:%.3g", a, stated);
  }
  return {worst_stated <= 1e-8,
          fmt("max |c0 - C0(1-b)/(2-b)| = %.3g (tol 1e-8);", worst_stated) + per +
              fmt("; with (2+b) instead: %.3g", worst_plus)};
}

// ---- 2: amplitude optimization against golden-section search
Outcome criterion2() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ua(0.55, 0.95), le(std::log(1e-3), std::log(0.1)),
      lm(std::log(0.01), std::log(10.0));
  double worst_val = 0, worst_arg = 0;
  for (int k = 0; k < 100; ++k) {
    const double a = ua(rng), eps = std::exp(le(rng)), m = std::exp(lm(rng));
    const double b = oracle::beta2(a), c0 = oracle::c0(a);
    auto obj = [&](double A) {
      return std::pow(eps, a - 1) * std::pow(A, b - 1) * m + 4 * c0 * std::pow(eps, a) * std::pow(A, 1 + b / 2);
    };
    const double A_lib = optimal_amplitude(m, eps, a);
    const double A_gs = oracle::golden_min(obj, 1e-4 * A_lib, 1e4 * A_lib);
    const double target = std::pow(4 * c0 * a / (1 - a), 1 - a) / a * std::pow(m, a);
    worst_val = std::max(worst_val, std::abs(obj(A_gs) - target) / target);
    worst_arg = std::max(worst_arg, std::abs(A_gs - A_lib) / A_gs);
  }
  return {worst_val <= 1e-8 && worst_arg <= 1e-6,
          fmt("100 draws: max rel |min - c m^a| = %.3g (tol 1e-8), max rel |A* - A_opt| = %.3g "
              "(tol 1e-6)",
              worst_val, worst_arg)};
}

// ---- 3: 2/(4 - beta) == (alpha + 1)/3
Outcome criterion3() {
  double worst = 0;
  int n = 0;
  for (double a = 0.51; a < 0.995; a += 0.01, ++n) {
    const double b = exponents(a).beta;
    worst = std::max(worst, std::abs(2 / (4 - b) - (a + 1) / 3));
  }
  return {worst <= 1e-14, fmt("%d alphas in [0.51, 0.99]: max |2/(4-b) - (a+1)/3| = %.3g", n, worst)};
}

// ---- 4: single-segment recovery energy
Outcome criterion4() {
  const ProfileConstants pc = profile_constants(kAlpha);
  const GridSpec g = make_grid(1024, 1024, -0.25, -0.75, 1.25, 0.75);
  std::vector<double> ratios;
  std::string detail;
  bool ok = true;
  for (double eps : {0.02, 0.01, 0.005}) {
    const TransverseProfile p = solve_profile(pc, 1.0, eps);
    const double cells = 2 * p.support_halfwidth / g.hy;
    ok = ok && cells >= 16;
    const VectorField2D u = rasterize_segment({0, 0}, {1, 0}, p, g);
    const double e = energy_total(u, make_energy_params(kAlpha, eps));
    ratios.push_back(e / pc.c);
    detail += fmt("eps=%g: E/c=%.5f (%.0f cells across); ", eps, ratios.back(), cells);
  }
  ok = ok && ratios[1] < ratios[0] && ratios[2] < ratios[1] && ratios[2] <= 1.05;
  return {ok, detail + "need decreasing and <= 1.05 at eps=0.005"};
}

// ---- 5: support width scaling from rasterized strips
Outcome criterion5() {
  const GridSpec g = make_grid(1024, 1024, -0.25, -0.75, 1.25, 0.75);
  std::vector<double> le, lw;
  std::string detail;
  for (double eps : {0.02, 0.01, 0.005, 0.0025}) {
    const VectorField2D u = rasterize_segment({0, 0}, {1, 0}, 1.0, eps, kAlpha, g);
    // Outermost nonzero face on the vertical line through the segment midpoint.
    const int i = 512;
    double w = 0;
    for (int j = 0; j < g.ny; ++j)
      if (u.ux(i, j) != 0) w = std::max(w, std::abs(g.origin.y + (j + 0.5) * g.hy));
    w += 0.5 * g.hy;
    le.push_back(std::log(eps));
    lw.push_back(std::log(w));
    detail += fmt("eps=%g: w=%.5f; ", eps, w);
  }
  const double slope = oracle::fit_slope(le, lw);
  const double target = (kAlpha + 1) / 3;
  return {std::abs(slope - target) <= 0.05,
          detail + fmt("slope %.4f vs %.4f (tol 0.05)", slope, target)};
}

// ---- 6: node correction on a Y graph
Outcome criterion6() {
  const WeightedGraph y{{{{-0.6, 0.5}, {0, 0}, 0.5}, {{0.6, 0.5}, {0, 0}, 0.5}, {{0, 0}, {0, -0.7}, 1.0}}};
  const GridSpec g = make_grid(512, 512, -1, -1, 1, 1);
  std::vector<double> le, lc;
  std::string detail;
  bool ok = true;
  for (double eps : {0.02, 0.01, 0.005}) {
    const SynthesisResult r = synthesize_graph(y, kAlpha, eps, g, true);
    const NodeReport& n = r.nodes.at(0);
    const double reduction = n.residual_before / n.residual_after;
    ok = ok && n.corrected && reduction >= 100;
    le.push_back(std::log(eps));
    lc.push_back(std::log(n.correction_energy));
    detail += fmt("eps=%g: residual %.3g -> %.3g (x%.3g), E_corr=%.4g; ", eps, n.residual_before,
                  n.residual_after, reduction, n.correction_energy);
  }
  const double slope = oracle::fit_slope(le, lc);
  const double target = (kAlpha + 1) / 3;
  ok = ok && std::abs(slope - target) <= 0.1;
  return {ok, detail + fmt("fitted exponent %.4f vs %.4f (tol 0.1)", slope, target)};
}

// ---- 7, 8, 11: solver runs
SolverConfig solver_config(int restarts) {
  SolverConfig c;
  c.alpha = kAlpha;
  c.grid = make_grid(256, 256, 0, 0, 1, 1);
  c.eps_schedule = continuation_schedule(0.08, 0.005, 5);
  c.delta_schedule = {0.1, 0.05, 0.02, 0.005, 0.001};
  c.direction = DirectionKind::majorize;
  c.steps_per_stage = 60;
  c.restarts = restarts;
  return c;
}

struct SegmentRun {
  SolveResult result;
  double max_logged_residual = 0;
  std::size_t logged = 0;
};

const SegmentRun& segment_run() {
  static std::optional<SegmentRun> run;
  if (!run) {
    SegmentRun r;
    r.result = solve(solver_config(1), AtomicMeasure{{{{0.2, 0.5}, 1.0}}},
                     AtomicMeasure{{{{0.8, 0.5}, 1.0}}}, [&](const TraceEntry& t) {
                       r.max_logged_residual = std::max(r.max_logged_residual, t.div_residual);
                       ++r.logged;
                     });
    run = std::move(r);
  }
  return *run;
}

Outcome criterion7() {
  const SolveResult& r = segment_run().result;
  const double c = profile_constants(kAlpha).c;
  const double graph = graph_energy(WeightedGraph{{{{0.2, 0.5}, {0.8, 0.5}, 1.0}}}, kAlpha);
  const double ratio = r.final_energy_delta0.total / c / graph;
  return {std::abs(ratio - 1) <= 0.10,
          fmt("E/c = %.5f, graph energy %.5f, ratio %.4f (need within 10%%); E at delta=0, "
              "final delta %.3g gives %.5f",
              r.final_energy_delta0.total / c, graph, ratio, r.stages.back().delta,
              r.final_energy.total / c)};
}

Outcome criterion8() {
  const oracle::YTree y = oracle::brute_force_y(0.25, 0.8, 0.5, 0.75, 0.8, 0.5, 0.5, 0.2, kAlpha);
  const SolveResult r =
      solve(solver_config(3), AtomicMeasure{{{{0.25, 0.8}, 0.5}, {{0.75, 0.8}, 0.5}}},
            AtomicMeasure{{{{0.5, 0.2}, 1.0}}});
  const double c = profile_constants(kAlpha).c;
  const double ratio = r.final_energy_delta0.total / c / y.energy;
  std::string obj;
  for (double o : r.restart_objectives) obj += fmt(" %.5f", o);
  return {ratio <= 1.05, fmt("brute-force Y %.5f at (%.3f, %.3f); best E/c = %.5f (restart %d), "
                             "ratio %.4f (need <= 1.05); restart objectives:",
                             y.energy, y.bx, y.by, r.final_energy_delta0.total / c,
                             r.best_restart, ratio) +
                             obj};
}

Outcome criterion11() {
  const SegmentRun& s = segment_run();
  return {s.logged > 0 && s.max_logged_residual <= 1e-6,
          fmt("%zu logged iterates, max divergence residual %.3g (need <= 1e-6)", s.logged,
              s.max_logged_residual)};
}

// ---- 9: dyadic functional
Outcome criterion9() {
  Measure1D atoms;
  atoms.atoms = {{1 / std::sqrt(2.0), 0.5}, {1 / M_PI, 0.3}, {std::exp(-1.0), 0.2}};
  const double expected = std::pow(0.5, 0.8) + std::pow(0.3, 0.8) + std::pow(0.2, 0.8);
  double atom_err = 0;
  for (int n = 20; n <= 24; ++n)
    atom_err = std::max(atom_err, std::abs(galpha_dyadic(atoms, 0.8, n) - expected));

  Measure1D leb;
  leb.density = {1.0};
  double leb_err = 0;
  for (int n = 0; n <= 20; ++n)
    leb_err = std::max(leb_err, std::abs(galpha_dyadic(leb, 0.8, n) - std::pow(2.0, n * 0.2)) /
                                    std::pow(2.0, n * 0.2));

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 1);
  int violations = 0;
  for (int t = 0; t < 100; ++t) {
    Measure1D m;
    const int k = 1 + t % 8;
    for (int j = 0; j < k; ++j) m.atoms.push_back({u(rng), u(rng)});
    const auto s = galpha_levels(m, 0.5 + 0.49 * u(rng), 20);
    for (int n = 1; n <= 20; ++n)
      if (s[n] < s[n - 1]) ++violations;
  }
  return {atom_err <= 1e-10 && leb_err <= 1e-14 && violations == 0,
          fmt("atomic |G - sum a^alpha| = %.3g (tol 1e-10); Lebesgue rel err %.3g; "
              "monotonicity violations %d / 100 measures",
              atom_err, leb_err, violations)};
}

// ---- 10: W1 against an LP oracle, metric axioms
Outcome criterion10() {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0, 1), w(0.05, 1);
  std::uniform_int_distribution<int> cnt(1, 5);
  auto draw = [&](double total) {
    AtomicMeasure m;
    const int n = cnt(rng);
    double s = 0;
    for (int k = 0; k < n; ++k) {
      m.atoms.push_back({{u(rng), u(rng)}, w(rng)});
      s += m.atoms.back().mass;
    }
    for (Atom& a : m.atoms) a.mass *= total / s;
    return m;
  };
  auto p2 = [](const AtomicMeasure& m) {
    std::vector<oracle::P2> v;
    for (const Atom& a : m.atoms) v.push_back({a.p.x, a.p.y, a.mass});
    return v;
  };
  double worst = 0;
  int triangle = 0, symmetry = 0;
  for (int t = 0; t < 100; ++t) {
    const double total = 0.2 + 2 * u(rng);
    const AtomicMeasure a = draw(total), b = draw(total), c = draw(total);
    const double ab = w1_distance(a, b), bc = w1_distance(b, c), ac = w1_distance(a, c);
    worst = std::max({worst, std::abs(ab - oracle::w1_lp(p2(a), p2(b))),
                      std::abs(bc - oracle::w1_lp(p2(b), p2(c))),
                      std::abs(ac - oracle::w1_lp(p2(a), p2(c)))});
    if (ac > ab + bc + 1e-12) ++triangle;
    if (std::abs(w1_distance(b, a) - ab) > 1e-12) ++symmetry;
  }
  return {worst <= 1e-9 && triangle == 0 && symmetry == 0,
          fmt("100 triples: max |W1 - LP| = %.3g (tol 1e-9), triangle violations %d, symmetry "
              "violations %d",
              worst, triangle, symmetry)};
}

// ---- 12: psi gradient against finite differences
Outcome criterion12() {
  const GridSpec g = make_grid(16, 16, 0, 0, 1, 1);
  const EnergyParams p = make_energy_params(kAlpha, 0.05, 0.05);
  std::mt19937_64 rng(12);
  std::normal_distribution<double> n(0, 0.05);
  ScalarField2D psi(g, Location::nodes), phi(g);
  for (double& v : psi.values()) v = n(rng);
  for (double& v : phi.values()) v = n(rng);
  const ScalarField2D grad = energy_gradient_psi(psi, phi, p);
  const VectorField2D gp = gradient(phi);
  std::uniform_int_distribution<int> node(1, g.nx - 1);
  double worst = 0;
  for (int k = 0; k < 20; ++k) {
    const int i = node(rng), j = node(rng);
    const double x0 = psi(i, j);
    auto f = [&](double x) {
      psi(i, j) = x;
      VectorField2D u = gp;
      u += curl_apply(psi);
      psi(i, j) = x0;
      return energy_total(u, p);
    };
    const double fd = oracle::central_difference(f, x0, 1e-6);
    worst = std::max(worst, std::abs(grad(i, j) - fd) / std::max(std::abs(fd), 1e-12));
  }
  return {worst <= 1e-5, fmt("20 interior nodes: max relative error %.3g (tol 1e-5)", worst)};
}

struct Criterion {
  int id;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, 1, criterion1},    {2, 5, criterion2},    {3, 1, criterion3},
      {4, 60, criterion4},   {5, 60, criterion5},   {6, 120, criterion6},
      {7, 300, criterion7},  {8, 600, criterion8},  {9, 5, criterion9},
      {10, 30, criterion10}, {11, 300, criterion11}, {12, 5, criterion12},
  };
  std::vector<int> wanted;
  for (int k = 1; k < argc; ++k) wanted.push_back(std::atoi(argv[k]));
  bool all_pass = true;
  for (const Criterion& c : all) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const Error& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = s <= c.budget_s;
    const bool pass = o.pass && in_time;
    all_pass = all_pass && pass;
    std::printf("criterion %2d: %s  %s  [%.2f s, budget %.0f s%s]\n", c.id, pass ? "PASS" : "FAIL",
                o.detail.c_str(), s, c.budget_s, in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  return all_pass ? 0 : 1;
}
