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

#include "elbranch/measures.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "elbranch/error.hpp"
#include "elbranch/mincost_flow.hpp"

namespace elbranch {

double Edge::length() const { return std::hypot(p1.x - p0.x, p1.y - p0.y); }

void WeightedGraph::validate() const {
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const Edge& e = edges[k];
    const bool finite = std::isfinite(e.p0.x) && std::isfinite(e.p0.y) &&
                        std::isfinite(e.p1.x) && std::isfinite(e.p1.y) && std::isfinite(e.w);
    if (!finite || !(e.w > 0) || !(e.length() > 0)) {
      std::ostringstream os;
      os << "edge " << k << ": weights must be positive and edges non-degenerate";
      fail(ErrorCode::domain, os.str());
    }
  }
}

double AtomicMeasure::total() const {
  double s = 0;
  for (const Atom& a : atoms) s += a.mass;
  return s;
}

double AtomicMeasure::total_abs() const {
  double s = 0;
  for (const Atom& a : atoms) s += std::abs(a.mass);
  return s;
}

std::vector<GraphNode> graph_nodes(const WeightedGraph& g, double tol) {
  g.validate();
  std::vector<GraphNode> nodes;
  if (g.edges.empty()) return nodes;
  double x0 = g.edges[0].p0.x, x1 = x0, y0 = g.edges[0].p0.y, y1 = y0;
  for (const Edge& e : g.edges)
    for (const Point& p : {e.p0, e.p1}) {
      x0 = std::min(x0, p.x);
      x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y);
      y1 = std::max(y1, p.y);
    }
  const double merge = tol * std::max(std::hypot(x1 - x0, y1 - y0), 1e-300);
  auto find = [&](const Point& p) {
    for (std::size_t k = 0; k < nodes.size(); ++k)
      if (std::hypot(nodes[k].p.x - p.x, nodes[k].p.y - p.y) <= merge) return static_cast<int>(k);
    nodes.push_back(GraphNode{p, {}, {}, 0, 0});
    return static_cast<int>(nodes.size() - 1);
  };
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    const Edge& e = g.edges[k];
    GraphNode& a = nodes[find(e.p0)];
    a.out_edges.push_back(static_cast<int>(k));
    a.outflow += e.w;
    GraphNode& b = nodes[find(e.p1)];
    b.in_edges.push_back(static_cast<int>(k));
    b.inflow += e.w;
  }
  return nodes;
}

double graph_energy(const WeightedGraph& g, double alpha) {
  double s = 0;
  for (const Edge& e : g.edges) s += std::pow(e.w, alpha) * e.length();
  return s;
}

AtomicMeasure graph_divergence(const WeightedGraph& g) {
  AtomicMeasure out;
  double wmax = 0;
  for (const Edge& e : g.edges) wmax = std::max(wmax, e.w);
  for (const GraphNode& n : graph_nodes(g)) {
    const double m = n.inflow - n.outflow;
    if (std::abs(m) > 1e-12 * wmax) out.atoms.push_back({n.p, m});
  }
  return out;
}

W1Result w1_solve(const AtomicMeasure& mu, const AtomicMeasure& nu) {
  std::vector<double> a, b;
  for (const Atom& x : mu.atoms) a.push_back(x.mass);
  for (const Atom& y : nu.atoms) b.push_back(y.mass);
  const auto tr = solve_transport(a, b, [&](int i, int j) {
    return std::hypot(mu.atoms[i].p.x - nu.atoms[j].p.x, mu.atoms[i].p.y - nu.atoms[j].p.y);
  });
  return {tr.cost, tr.supply_potential, tr.demand_potential};
}

double w1_distance(const AtomicMeasure& mu, const AtomicMeasure& nu) {
  return w1_solve(mu, nu).distance;
}

double g1_penalty(const AtomicMeasure& mu, const AtomicMeasure& nu, const AtomicMeasure& fplus,
                  const AtomicMeasure& fminus, double alpha, double C) {
  require(alpha > 0.5, ErrorCode::domain, "g1_penalty needs alpha > 1/2");
  const double e = 2 * alpha - 1;
  const double w_plus = w1_distance(mu, fplus);
  const double w_minus = w1_distance(nu, fminus);
  // 0^e = 0 for e > 0: matching measures carry no penalty.
  return C * (w_plus > 0 ? std::pow(w_plus, e) : 0.0) +
         C * (w_minus > 0 ? std::pow(w_minus, e) : 0.0);
}

ScalarField2D smooth_onto_grid(const AtomicMeasure& f, double sigma, const GridSpec& grid,
                               bool check_clearance) {
  std::vector<double> s(f.atoms.size(), sigma);
  return smooth_onto_grid(f, s, grid, check_clearance);
}

ScalarField2D smooth_onto_grid(const AtomicMeasure& f, std::span<const double> sigma,
                               const GridSpec& grid, bool check_clearance) {
  grid.validate();
  require(sigma.size() == f.atoms.size(), ErrorCode::precondition,
          "smooth_onto_grid: one width per atom required");
  ScalarField2D out(grid);
  const double hmax = std::max(grid.hx, grid.hy);
  std::vector<double> w;
  for (std::size_t k = 0; k < f.atoms.size(); ++k) {
    const Atom& a = f.atoms[k];
    const double s = sigma[k];
    if (!(s >= 2 * hmax * (1 - 1e-12))) {
      std::ostringstream os;
      os << "smoothing width " << s << " below 2 cell widths (" << 2 * hmax << ")";
      fail(ErrorCode::domain, os.str());
    }
    const double clear = std::min({a.p.x - grid.origin.x, grid.x_max() - a.p.x,
                                   a.p.y - grid.origin.y, grid.y_max() - a.p.y});
    if (clear < 0 || (check_clearance && clear < 3 * s)) {
      std::ostringstream os;
      os << "atom at (" << a.p.x << ", " << a.p.y << ") lies within 3 sigma of the boundary";
      fail(ErrorCode::geometry, os.str());
    }
    if (a.mass == 0) continue;
    const double r = 4 * s;
    const int i0 = std::max(0, static_cast<int>(std::floor((a.p.x - r - grid.origin.x) / grid.hx)));
    const int i1 = std::min(grid.nx - 1, static_cast<int>(std::ceil((a.p.x + r - grid.origin.x) / grid.hx)));
    const int j0 = std::max(0, static_cast<int>(std::floor((a.p.y - r - grid.origin.y) / grid.hy)));
    const int j1 = std::min(grid.ny - 1, static_cast<int>(std::ceil((a.p.y + r - grid.origin.y) / grid.hy)));
    const int wx = i1 - i0 + 1;
    w.assign(static_cast<std::size_t>(wx) * (j1 - j0 + 1), 0.0);
    double total = 0;
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) {
        const Point c = grid.cell_center(i, j);
        const double d2 = (c.x - a.p.x) * (c.x - a.p.x) + (c.y - a.p.y) * (c.y - a.p.y);
        if (d2 > r * r) continue;
        const double v = std::exp(-0.5 * d2 / (s * s));
        w[static_cast<std::size_t>(j - j0) * wx + (i - i0)] = v;
        total += v;
      }
    require(total > 0, ErrorCode::numeric, "smoothing kernel missed every cell");
    const double scale = a.mass / (total * grid.cell_area());
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) out(i, j) += scale * w[static_cast<std::size_t>(j - j0) * wx + (i - i0)];
  }
  return out;
}

AtomicMeasure positive_part(const AtomicMeasure& f) {
  AtomicMeasure out;
  for (const Atom& a : f.atoms)
    if (a.mass > 0) out.atoms.push_back(a);
  return out;
}

AtomicMeasure negative_part(const AtomicMeasure& f) {
  AtomicMeasure out;
  for (const Atom& a : f.atoms)
    if (a.mass < 0) out.atoms.push_back({a.p, -a.mass});
  return out;
}

}  // namespace elbranch
