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

#include "elbranch/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "elbranch/constants.hpp"
#include "elbranch/error.hpp"

namespace elbranch {

namespace {

// Neumaier compensated summation.
struct Sum {
  double s = 0, c = 0;
  void add(double v) {
    const double t = s + v;
    if (std::abs(s) >= std::abs(v)) c += (s - t) + v;
    else c += (v - t) + s;
    s = t;
  }
  double value() const { return s + c; }
};

void check_window(const GridSpec& g, const Window& w) {
  const double tol = 1e-12 * std::max(g.nx * g.hx, g.ny * g.hy);
  if (!(w.x0 < w.x1 && w.y0 < w.y1) || w.x0 < g.origin.x - tol || w.y0 < g.origin.y - tol ||
      w.x1 > g.x_max() + tol || w.y1 > g.y_max() + tol)
    fail(ErrorCode::geometry, "slice window is empty or leaves the domain");
}

}  // namespace

SliceProfile slice_flux(const VectorField2D& u, Axis axis, const Window& w) {
  const GridSpec& g = u.spec();
  check_window(g, w);
  SliceProfile s;
  s.axis = axis;
  if (axis == Axis::x) {
    s.spacing = g.hx;
    for (int i = 0; i <= g.nx; ++i) {
      const double x = g.origin.x + i * g.hx;
      if (x < w.x0 || x > w.x1) continue;
      double m = 0;
      for (int j = 0; j < g.ny; ++j) {
        const double y = g.origin.y + (j + 0.5) * g.hy;
        if (y >= w.y0 && y <= w.y1) m += u.ux(i, j) * g.hy;
      }
      s.positions.push_back(x);
      s.flux.push_back(m);
    }
  } else {
    s.spacing = g.hy;
    for (int j = 0; j <= g.ny; ++j) {
      const double y = g.origin.y + j * g.hy;
      if (y < w.y0 || y > w.y1) continue;
      double m = 0;
      for (int i = 0; i < g.nx; ++i) {
        const double x = g.origin.x + (i + 0.5) * g.hx;
        if (x >= w.x0 && x <= w.x1) m += u.uy(i, j) * g.hx;
      }
      s.positions.push_back(y);
      s.flux.push_back(m);
    }
  }
  if (s.positions.empty()) fail(ErrorCode::geometry, "slice window contains no grid line");
  return s;
}

double slice_alpha_bound(const SliceProfile& s, double alpha) {
  double b = 0;
  for (double m : s.flux) b += std::pow(std::abs(m), alpha);
  return b * s.spacing;
}

double slice_total_variation(const SliceProfile& s) {
  double tv = 0;
  for (std::size_t k = 1; k < s.flux.size(); ++k) tv += std::abs(s.flux[k] - s.flux[k - 1]);
  return tv;
}

std::vector<double> galpha_levels(const Measure1D& nu, double alpha, int n_max) {
  require(n_max >= 0 && n_max <= 24, ErrorCode::domain, "n_max must lie in [0, 24]");
  require(alpha > 0, ErrorCode::domain, "alpha must be positive");
  for (const auto& [x, m] : nu.atoms)
    require(x >= 0 && x < 1, ErrorCode::domain, "atoms must lie in [0, 1)");
  const std::size_t N = nu.density.size();
  // Prefix masses of the density: F[k] = mass of [0, k/N).
  std::vector<double> F(N + 1, 0.0);
  {
    Sum acc;
    for (std::size_t k = 0; k < N; ++k) {
      acc.add(nu.density[k] / static_cast<double>(N));
      F[k + 1] = acc.value();
    }
  }
  auto cumulative = [&](double x) {  // density mass of [0, x)
    if (N == 0) return 0.0;
    const double pos = x * static_cast<double>(N);
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(pos), N);
    if (k == N) return F[N];
    return F[k] + nu.density[k] * (pos - static_cast<double>(k)) / static_cast<double>(N);
  };

  std::vector<double> levels;
  std::vector<std::pair<std::size_t, double>> atoms;
  for (int n = 0; n <= n_max; ++n) {
    const std::size_t bins = std::size_t{1} << n;
    const double width = 1.0 / static_cast<double>(bins);
    // Atoms binned and merged per bin.
    atoms.clear();
    for (const auto& [x, m] : nu.atoms)
      atoms.push_back({std::min(static_cast<std::size_t>(std::ldexp(x, n)), bins - 1), m});
    std::sort(atoms.begin(), atoms.end());
    Sum total;
    if (N == 0) {
      for (std::size_t k = 0; k < atoms.size();) {
        Sum m;
        const std::size_t b = atoms[k].first;
        for (; k < atoms.size() && atoms[k].first == b; ++k) m.add(atoms[k].second);
        total.add(std::pow(std::abs(m.value()), alpha));
      }
    } else {
      std::size_t a = 0;
      // Pairwise summation over bins keeps equal contributions exact.
      std::vector<double> terms(bins);
      for (std::size_t i = 0; i < bins; ++i) {
        double m = cumulative(static_cast<double>(i + 1) * width) -
                   cumulative(static_cast<double>(i) * width);
        for (; a < atoms.size() && atoms[a].first == i; ++a) m += atoms[a].second;
        terms[i] = std::pow(std::abs(m), alpha);
      }
      for (std::size_t len = 1; len < bins; len *= 2)
        for (std::size_t i = 0; i + len < bins; i += 2 * len) terms[i] += terms[i + len];
      total.add(terms[0]);
    }
    levels.push_back(total.value());
  }
  return levels;
}

double galpha_dyadic(const Measure1D& nu, double alpha, int n_max) {
  const auto l = galpha_levels(nu, alpha, n_max);
  return *std::max_element(l.begin(), l.end());
}

SliceReport slice_report(const VectorField2D& u, const EnergyParams& p, Axis axis,
                         const Window& w) {
  SliceReport r;
  r.window = w;
  r.axis = axis;
  const SliceProfile s = slice_flux(u, axis, w);
  r.bound = slice_alpha_bound(s, p.alpha);
  r.total_variation = slice_total_variation(s);
  const EnergyBreakdown e = energy(u, p);
  const GridSpec& g = u.spec();
  double we = 0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const Point c = g.cell_center(i, j);
      if (c.x >= w.x0 && c.x <= w.x1 && c.y >= w.y0 && c.y <= w.y1) we += e.density(i, j);
    }
  r.window_energy = we * g.cell_area();
  const double cc = profile_constants(p.alpha).c;
  r.ratio = r.window_energy > 0 ? cc * r.bound / r.window_energy : 0.0;
  return r;
}

RunReport run_report(const SolveResult& res, const SolverConfig& cfg,
                     const std::vector<std::pair<Axis, Window>>& windows) {
  RunReport r;
  r.alpha = cfg.alpha;
  r.eps = cfg.eps_schedule.empty() ? 0.0 : cfg.eps_schedule.back();
  r.delta = res.stages.empty() ? 0.0 : res.stages.back().delta;
  r.concave_term = res.final_energy_delta0.concave_term;
  r.dirichlet_term = res.final_energy_delta0.dirichlet_term;
  r.total = res.final_energy_delta0.total;
  r.total_regularized = res.final_energy.total;
  r.term_ratio = r.dirichlet_term > 0 ? r.concave_term / r.dirichlet_term : 0.0;
  r.mass = res.mass;
  r.div_residual = res.div_residual;
  r.mass_feasible = res.mass_feasible;
  r.converged = res.converged;
  if (r.eps > 0) {
    const EnergyParams p = make_energy_params(cfg.alpha, r.eps, 0.0);
    for (const auto& [axis, w] : windows) r.slices.push_back(slice_report(res.u, p, axis, w));
  }
  return r;
}

std::string format_report(const RunReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "alpha            " << r.alpha << "\n"
     << "eps              " << r.eps << "\n"
     << "delta            " << r.delta << "\n"
     << "concave term     " << r.concave_term << "\n"
     << "dirichlet term   " << r.dirichlet_term << "\n"
     << "energy           " << r.total << "\n"
     << "energy (delta)   " << r.total_regularized << "\n"
     << "term ratio       " << r.term_ratio << "\n"
     << "mass             " << r.mass << "\n"
     << "div residual     " << r.div_residual << "\n"
     << "mass feasible    " << (r.mass_feasible ? "yes" : "no") << "\n"
     << "converged        " << (r.converged ? "yes" : "no") << "\n";
  for (const SliceReport& s : r.slices)
    os << "slice " << (s.axis == Axis::x ? 'x' : 'y') << " [" << s.window.x0 << ", "
       << s.window.x1 << "] x [" << s.window.y0 << ", " << s.window.y1 << "]: bound " << s.bound
       << ", window energy " << s.window_energy << ", ratio " << s.ratio << ", TV "
       << s.total_variation << "\n";
  return os.str();
}

}  // namespace elbranch
