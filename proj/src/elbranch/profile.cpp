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

#include "elbranch/profile.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "elbranch/energy.hpp"
#include "elbranch/error.hpp"
#include "elbranch/poisson.hpp"

namespace elbranch {

namespace {

struct Box {
  int i0, i1, j0, j1;  // inclusive cell ranges
};

}  // namespace

double TransverseProfile::z(double t) const {
  const double tau = std::abs(t) - plateau_halfwidth;
  if (tau <= 0) return 1.0;
  if (tau >= T) return 0.0;
  auto it = std::upper_bound(t_table.begin(), t_table.end(), tau);
  const std::size_t k = std::min<std::size_t>(it - t_table.begin(), t_table.size() - 1);
  const double ta = t_table[k - 1], tb = t_table[k];
  const double w = tb > ta ? (tau - ta) / (tb - ta) : 0.0;
  const double q = q_table[k - 1] + w * (q_table[k] - q_table[k - 1]);
  return std::pow(std::max(0.0, 1.0 - q * q), 1.0 / (1.0 - beta));
}

double TransverseProfile::intensity(double s, double amplitude_scale) const {
  const double a = amplitude * amplitude_scale;
  return a * z(a * s);
}

double TransverseProfile::cap_offset(double amplitude_scale) const {
  return std::numbers::pi * first_moment / (amplitude * amplitude_scale * theta);
}

TransverseProfile solve_profile(double alpha, double theta, double eps, int n_samples) {
  return solve_profile(profile_constants(alpha), theta, eps, n_samples);
}

TransverseProfile solve_profile(const ProfileConstants& pc, double theta, double eps,
                                int n_samples) {
  require(theta > 0 && std::isfinite(theta), ErrorCode::domain, "theta must be positive");
  require(eps > 0 && std::isfinite(eps), ErrorCode::domain, "eps must be positive");
  require(n_samples >= 64, ErrorCode::domain, "profile needs at least 64 samples");

  TransverseProfile p;
  p.constants = pc;
  p.alpha = pc.alpha;
  p.beta = pc.beta;
  p.theta = theta;
  p.eps = eps;
  p.amplitude = optimal_amplitude(theta, eps, pc);
  const double beta = pc.beta;
  p.kappa = 2 * pc.c0 * (2 + beta) / ((1 - beta) * theta);

  // t(q) = 2/(kappa (1-beta)) int_0^q (1 - r^2)^(beta / (2 (1-beta))) dr
  const double e_t = beta / (2 * (1 - beta));
  const double scale = 2 / (p.kappa * (1 - beta));
  auto dt = [&](double q) { return std::pow(std::max(0.0, 1 - q * q), e_t); };

  const int n = n_samples;
  p.q_table.resize(n);
  p.t_table.resize(n);
  p.z_table.resize(n);
  boost::math::quadrature::tanh_sinh<double> ts;
  double acc = 0;
  for (int k = 0; k < n; ++k) {
    const double q = static_cast<double>(k) / (n - 1);
    if (k > 0) {
      const double a = p.q_table[k - 1];
      acc += k == n - 1 ? ts.integrate(dt, a, q)
                        : boost::math::quadrature::gauss<double, 15>::integrate(dt, a, q);
    }
    p.q_table[k] = q;
    p.t_table[k] = scale * acc;
    p.z_table[k] = std::pow(std::max(0.0, 1 - q * q), 1 / (1 - beta));
  }
  p.T = p.t_table.back();
  const double T_closed = std::beta(0.5, e_t + 1) / (p.kappa * (1 - beta));
  if (std::abs(p.T - T_closed) > 1e-8 * T_closed) {
    std::ostringstream os;
    os.precision(17);
    os << "profile length quadrature " << p.T << " disagrees with " << T_closed;
    fail(ErrorCode::numeric, os.str());
  }

  // int_0^T z0 = 2/(kappa (1-beta)) int_0^1 (1-q^2)^((1 + beta/2)/(1-beta)) dq
  const double e_m = (1 + beta / 2) / (1 - beta);
  p.mass_integral =
      scale * ts.integrate([&](double q) { return std::pow(std::max(0.0, 1 - q * q), e_m); },
                           0.0, 1.0);
  const double plateau = (theta - 2 * p.mass_integral) / 2;
  if (plateau < -1e-9 * theta) {
    std::ostringstream os;
    os.precision(17);
    os << "mass invariant violated: int z0 = " << p.mass_integral << " exceeds theta/2 = "
       << theta / 2;
    fail(ErrorCode::numeric, os.str());
  }
  p.plateau_halfwidth = std::max(0.0, plateau);

  // int_0^T z0(t) t dt by the trapezoid rule in q.
  double m1 = 0;
  for (int k = 1; k < n; ++k) {
    auto f = [&](int i) { return p.z_table[i] * p.t_table[i] * scale * dt(p.q_table[i]); };
    m1 += 0.5 * (f(k - 1) + f(k)) * (p.q_table[k] - p.q_table[k - 1]);
  }
  const double P = p.plateau_halfwidth;
  p.first_moment = 0.5 * P * P + P * p.mass_integral + m1;
  p.support_halfwidth = (P + p.T) / p.amplitude;
  return p;
}

VectorField2D rasterize_segment(Point p0, Point p1, double theta, double eps, double alpha,
                                const GridSpec& grid, const RasterOptions& opt) {
  return rasterize_segment(p0, p1, solve_profile(alpha, theta, eps), grid, opt);
}

VectorField2D rasterize_segment(Point p0, Point p1, const TransverseProfile& prof,
                                const GridSpec& grid, const RasterOptions& opt) {
  grid.validate();
  require(opt.amplitude_scale > 0, ErrorCode::domain, "amplitude scale must be positive");
  const double R = prof.support_halfwidth / opt.amplitude_scale;
  const double hmax = std::max(grid.hx, grid.hy);
  if (R < opt.min_cells * hmax) {
    const double width = std::max(grid.nx * grid.hx, grid.ny * grid.hy);
    std::ostringstream os;
    os << "support halfwidth " << R << " spans " << R / hmax << " cells; need "
       << opt.min_cells << " (at least " << static_cast<long>(std::ceil(opt.min_cells * width / R))
       << " cells across the domain)";
    fail(ErrorCode::resolution, os.str());
  }
  const double L = std::hypot(p1.x - p0.x, p1.y - p0.y);
  require(L > 0, ErrorCode::domain, "degenerate segment");
  const double ex = (p1.x - p0.x) / L, ey = (p1.y - p0.y) / L;
  const double d = prof.cap_offset(opt.amplitude_scale);
  if (L <= 2 * d) {
    std::ostringstream os;
    os << "segment of length " << L << " is shorter than its two caps (" << 2 * d << ")";
    fail(ErrorCode::geometry, os.str());
  }
  const Point c0{p0.x + d * ex, p0.y + d * ey};
  const Point c1{p1.x - d * ex, p1.y - d * ey};
  const double bx0 = std::min(c0.x, c1.x) - R, bx1 = std::max(c0.x, c1.x) + R;
  const double by0 = std::min(c0.y, c1.y) - R, by1 = std::max(c0.y, c1.y) + R;
  if (bx0 < grid.origin.x + grid.hx || bx1 > grid.x_max() - grid.hx ||
      by0 < grid.origin.y + grid.hy || by1 > grid.y_max() - grid.hy) {
    std::ostringstream os;
    os << "segment support [" << bx0 << ", " << bx1 << "] x [" << by0 << ", " << by1
       << "] leaves the domain";
    fail(ErrorCode::geometry, os.str());
  }

  auto magnitude = [&](double x, double y) {
    const double rx = x - p0.x, ry = y - p0.y;
    const double tau = rx * ex + ry * ey;
    const double s = -rx * ey + ry * ex;
    double r;
    if (tau < d) r = std::hypot(tau - d, s);
    else if (tau > L - d) r = std::hypot(tau - (L - d), s);
    else r = std::abs(s);
    return r >= R ? 0.0 : prof.intensity(r, opt.amplitude_scale);
  };

  VectorField2D u(grid);
  const int i0 = std::max(0, static_cast<int>(std::floor((bx0 - grid.origin.x) / grid.hx)) - 1);
  const int i1 = std::min(grid.nx, static_cast<int>(std::ceil((bx1 - grid.origin.x) / grid.hx)) + 1);
  const int j0 = std::max(0, static_cast<int>(std::floor((by0 - grid.origin.y) / grid.hy)) - 1);
  const int j1 = std::min(grid.ny, static_cast<int>(std::ceil((by1 - grid.origin.y) / grid.hy)) + 1);
  if (ex != 0)
    for (int j = j0; j < std::min(j1, grid.ny); ++j)
      for (int i = i0; i <= i1; ++i) {
        const double m = magnitude(grid.origin.x + i * grid.hx, grid.origin.y + (j + 0.5) * grid.hy);
        if (m != 0) u.ux(i, j) = m * ex;
      }
  if (ey != 0)
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i < std::min(i1, grid.nx); ++i) {
        const double m = magnitude(grid.origin.x + (i + 0.5) * grid.hx, grid.origin.y + j * grid.hy);
        if (m != 0) u.uy(i, j) = m * ey;
      }
  return u;
}

NodeCorrection node_correction(const ScalarField2D& g, Point center, double R, double tol) {
  require(g.location() == Location::cells, ErrorCode::dimension,
          "node_correction expects cell data");
  require(R > 0, ErrorCode::domain, "ball radius must be positive");
  const GridSpec& grid = g.spec();
  NodeCorrection out;
  out.mask.assign(g.size(), 0);
  double gl1 = 0, outside = 0, mean = 0;
  int count = 0;
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const Point c = grid.cell_center(i, j);
      const bool in = std::hypot(c.x - center.x, c.y - center.y) <= R;
      const double v = g(i, j);
      gl1 += std::abs(v);
      if (in) {
        if (i == 0 || j == 0 || i == grid.nx - 1 || j == grid.ny - 1)
          fail(ErrorCode::geometry, "correction ball touches the patch boundary");
        out.mask[static_cast<std::size_t>(j) * grid.nx + i] = 1;
        mean += v;
        ++count;
      } else {
        outside += std::abs(v);
      }
    }
  require(count > 0, ErrorCode::geometry, "correction ball contains no cell center");
  if (outside > 1e-8 * gl1) {
    std::ostringstream os;
    os << "data not supported in the ball: " << outside * grid.cell_area() << " of "
       << gl1 * grid.cell_area() << " lies outside";
    fail(ErrorCode::geometry, os.str());
  }
  if (std::abs(mean) > 1e-8 * gl1) {
    std::ostringstream os;
    os << "data has nonzero mean on the ball: " << mean * grid.cell_area() << " (||g||_1 = "
       << gl1 * grid.cell_area() << ")";
    fail(ErrorCode::compatibility, os.str());
  }
  out.v = VectorField2D(grid);
  out.gradient_part = VectorField2D(grid);
  out.rotational_part = VectorField2D(grid);
  out.psi = ScalarField2D(grid, Location::nodes);
  if (gl1 == 0) return out;

  ScalarField2D rhs(grid);
  for (std::size_t k = 0; k < rhs.size(); ++k)
    if (out.mask[k]) rhs.values()[k] = g.values()[k] - mean / count;

  const ScalarField2D w = masked_poisson_solve(rhs, out.mask, BoundaryCondition::dirichlet_zero, tol);
  out.gradient_part = gradient(w);

  // Split grad w into faces inside the ball and faces crossing its boundary.
  auto in = [&](int i, int j) { return out.mask[static_cast<std::size_t>(j) * grid.nx + i] != 0; };
  VectorField2D crossing(grid);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 1; i < grid.nx; ++i)
      if (in(i - 1, j) != in(i, j)) crossing.ux(i, j) = out.gradient_part.ux(i, j);
  for (int j = 1; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i)
      if (in(i, j - 1) != in(i, j)) crossing.uy(i, j) = out.gradient_part.uy(i, j);

  ScalarField2D b = divergence(crossing);
  double bmean = 0;
  for (std::size_t k = 0; k < b.size(); ++k)
    if (out.mask[k]) bmean += b.values()[k];
  bmean /= count;
  for (std::size_t k = 0; k < b.size(); ++k)
    b.values()[k] = out.mask[k] ? b.values()[k] - bmean : 0.0;
  const ScalarField2D h = masked_poisson_solve(b, out.mask, BoundaryCondition::neumann_zero_flux, tol);
  const VectorField2D gh = gradient(h);
  VectorField2D& c = out.rotational_part;
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 1; i < grid.nx; ++i) {
      if (in(i - 1, j) && in(i, j)) c.ux(i, j) = gh.ux(i, j);
      else if (in(i - 1, j) != in(i, j)) c.ux(i, j) = -crossing.ux(i, j);
    }
  for (int j = 1; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      if (in(i, j - 1) && in(i, j)) c.uy(i, j) = gh.uy(i, j);
      else if (in(i, j - 1) != in(i, j)) c.uy(i, j) = -crossing.uy(i, j);
    }
  // Stream function of c on the nodes of the ball cells (c is divergence-free
  // there), by breadth-first integration along cell edges.
  {
    const int W = grid.nx + 1;
    std::vector<char> seen(static_cast<std::size_t>(W) * (grid.ny + 1), 0);
    std::vector<std::pair<int, int>> queue;
    auto touches = [&](int i, int j) {  // node (i, j) is a corner of a ball cell
      for (int dj = -1; dj <= 0; ++dj)
        for (int di = -1; di <= 0; ++di) {
          const int ci = i + di, cj = j + dj;
          if (ci >= 0 && cj >= 0 && ci < grid.nx && cj < grid.ny && in(ci, cj)) return true;
        }
      return false;
    };
    // Edge along a vertical face (i, j)-(i, j+1) belongs to a ball cell on either side.
    auto vface = [&](int i, int j) {
      return (i > 0 && in(i - 1, j)) || (i < grid.nx && in(i, j));
    };
    auto hface = [&](int i, int j) {
      return (j > 0 && in(i, j - 1)) || (j < grid.ny && in(i, j));
    };
    for (int j = 0; j <= grid.ny && queue.empty(); ++j)
      for (int i = 0; i <= grid.nx && queue.empty(); ++i)
        if (touches(i, j)) {
          seen[static_cast<std::size_t>(j) * W + i] = 1;
          queue.emplace_back(i, j);
        }
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const auto [i, j] = queue[q];
      const double p = out.psi(i, j);
      auto visit = [&](int a, int b, double v) {
        char& s = seen[static_cast<std::size_t>(b) * W + a];
        if (s) return;
        s = 1;
        out.psi(a, b) = v;
        queue.emplace_back(a, b);
      };
      if (j < grid.ny && vface(i, j)) visit(i, j + 1, p + c.ux(i, j) * grid.hy);
      if (j > 0 && vface(i, j - 1)) visit(i, j - 1, p - c.ux(i, j - 1) * grid.hy);
      if (i < grid.nx && hface(i, j)) visit(i + 1, j, p - c.uy(i, j) * grid.hx);
      if (i > 0 && hface(i - 1, j)) visit(i - 1, j, p + c.uy(i - 1, j) * grid.hx);
    }
  }
  out.v = out.gradient_part;
  out.v += c;

  const ScalarField2D dv = divergence(out.v);
  double num = 0, den = 0;
  for (std::size_t k = 0; k < dv.size(); ++k) {
    const double r = dv.values()[k] - (out.mask[k] ? g.values()[k] : 0.0);
    num += r * r;
    den += g.values()[k] * g.values()[k];
  }
  out.poisson_residual = std::sqrt(num / den);
  return out;
}

namespace {

double point_segment_distance(Point p, Point a, Point b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double l2 = vx * vx + vy * vy;
  double t = l2 > 0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / l2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - a.x - t * vx, p.y - a.y - t * vy);
}

}  // namespace

SynthesisResult synthesize_graph(const WeightedGraph& g, double alpha, double eps,
                                 const GridSpec& grid, bool correct_nodes, double ball_factor) {
  g.validate();
  grid.validate();
  require(ball_factor > 1, ErrorCode::domain, "ball factor must exceed 1");
  const ProfileConstants pc = profile_constants(alpha);
  SynthesisResult out;
  out.u = VectorField2D(grid);

  std::map<double, TransverseProfile> profiles;
  auto profile_for = [&](double w) -> const TransverseProfile& {
    auto it = profiles.find(w);
    if (it == profiles.end()) it = profiles.emplace(w, solve_profile(pc, w, eps)).first;
    return it->second;
  };
  for (const Edge& e : g.edges) {
    const TransverseProfile& prof = profile_for(e.w);
    out.u += rasterize_segment(e.p0, e.p1, prof, grid);
    out.support_halfwidth.push_back(prof.support_halfwidth);
  }

  const std::vector<GraphNode> nodes = graph_nodes(g);
  std::vector<double> ball(nodes.size(), 0.0);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    double r = 0;
    for (int e : nodes[k].out_edges) r = std::max(r, out.support_halfwidth[e]);
    for (int e : nodes[k].in_edges) r = std::max(r, out.support_halfwidth[e]);
    ball[k] = ball_factor * r;
  }

  // Strips that come close away from the node balls.
  for (std::size_t a = 0; a < g.edges.size(); ++a)
    for (std::size_t b = a + 1; b < g.edges.size(); ++b) {
      const Edge& ea = g.edges[a];
      const Edge& eb = g.edges[b];
      const double reach = out.support_halfwidth[a] + out.support_halfwidth[b];
      bool close = false;
      for (int s = 0; s <= 200 && !close; ++s) {
        const double t = s / 200.0;
        const Point p{ea.p0.x + t * (ea.p1.x - ea.p0.x), ea.p0.y + t * (ea.p1.y - ea.p0.y)};
        bool near_node = false;
        for (std::size_t k = 0; k < nodes.size(); ++k)
          if (std::hypot(p.x - nodes[k].p.x, p.y - nodes[k].p.y) < ball[k]) near_node = true;
        if (!near_node && point_segment_distance(p, eb.p0, eb.p1) < reach) close = true;
      }
      if (close) {
        std::ostringstream os;
        os << "strips of edges " << a << " and " << b << " overlap outside the node balls";
        out.warnings.push_back(os.str());
      }
    }
  for (std::size_t a = 0; a < nodes.size(); ++a)
    for (std::size_t b = a + 1; b < nodes.size(); ++b)
      if (nodes[a].degree() >= 2 && nodes[b].degree() >= 2 &&
          std::hypot(nodes[a].p.x - nodes[b].p.x, nodes[a].p.y - nodes[b].p.y) < ball[a] + ball[b]) {
        std::ostringstream os;
        os << "correction balls of nodes " << a << " and " << b << " overlap";
        out.warnings.push_back(os.str());
      }

  const EnergyParams ep = make_energy_params(alpha, eps, 0.0);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const GraphNode& n = nodes[k];
    if (n.degree() < 2) continue;
    NodeReport rep;
    rep.p = n.p;
    rep.degree = n.degree();
    rep.imbalance = n.outflow - n.inflow;
    rep.ball_radius = ball[k];

    // Window of cells around the ball with a two-cell margin.
    const double R = ball[k];
    const int i0 = static_cast<int>(std::floor((n.p.x - R - grid.origin.x) / grid.hx)) - 2;
    const int i1 = static_cast<int>(std::ceil((n.p.x + R - grid.origin.x) / grid.hx)) + 2;
    const int j0 = static_cast<int>(std::floor((n.p.y - R - grid.origin.y) / grid.hy)) - 2;
    const int j1 = static_cast<int>(std::ceil((n.p.y + R - grid.origin.y) / grid.hy)) + 2;
    if (i0 < 0 || j0 < 0 || i1 >= grid.nx || j1 >= grid.ny) {
      std::ostringstream os;
      os << "correction ball of radius " << R << " at (" << n.p.x << ", " << n.p.y
         << ") leaves the domain";
      fail(ErrorCode::geometry, os.str());
    }
    const Box box{i0, i1, j0, j1};
    GridSpec patch;
    patch.nx = box.i1 - box.i0 + 1;
    patch.ny = box.j1 - box.j0 + 1;
    patch.hx = grid.hx;
    patch.hy = grid.hy;
    patch.origin = {grid.origin.x + box.i0 * grid.hx, grid.origin.y + box.j0 * grid.hy};

    const ScalarField2D div = divergence(out.u);
    ScalarField2D target(patch), resid(patch);
    std::vector<char> in_ball(resid.size(), 0);
    const double sigma = R / 6;
    double bump_total = 0;
    for (int j = 0; j < patch.ny; ++j)
      for (int i = 0; i < patch.nx; ++i) {
        const Point c = patch.cell_center(i, j);
        const double r = std::hypot(c.x - n.p.x, c.y - n.p.y);
        if (r > R) continue;
        in_ball[static_cast<std::size_t>(j) * patch.nx + i] = 1;
        target(i, j) = std::exp(-0.5 * r * r / (sigma * sigma));
        bump_total += target(i, j);
      }
    double before = 0;
    for (int j = 0; j < patch.ny; ++j)
      for (int i = 0; i < patch.nx; ++i) {
        if (!in_ball[static_cast<std::size_t>(j) * patch.nx + i]) continue;
        target(i, j) *= rep.imbalance / (bump_total * patch.cell_area());
        resid(i, j) = target(i, j) - div(box.i0 + i, box.j0 + j);
        before += std::abs(resid(i, j)) * patch.cell_area();
      }
    rep.residual_before = before;
    rep.residual_after = before;
    if (correct_nodes && before > 0) {
      // Remove the mean so the data is compatible; the discarded part is the
      // flux that leaves the ball through the strips (discretization error).
      double mean = 0;
      int cnt = 0;
      for (std::size_t c = 0; c < resid.size(); ++c)
        if (in_ball[c]) {
          mean += resid.values()[c];
          ++cnt;
        }
      for (std::size_t c = 0; c < resid.size(); ++c)
        if (in_ball[c]) resid.values()[c] -= mean / cnt;
      const NodeCorrection nc = node_correction(resid, n.p, R);
      VectorField2D v(grid);
      for (int j = 0; j < patch.ny; ++j)
        for (int i = 0; i <= patch.nx; ++i) v.ux(box.i0 + i, box.j0 + j) = nc.v.ux(i, j);
      for (int j = 0; j <= patch.ny; ++j)
        for (int i = 0; i < patch.nx; ++i) v.uy(box.i0 + i, box.j0 + j) = nc.v.uy(i, j);
      out.u += v;
      rep.correction_energy = energy_total(nc.v, ep);
      rep.corrected = true;
      const ScalarField2D div2 = divergence(out.u);
      double after = 0;
      for (int j = 0; j < patch.ny; ++j)
        for (int i = 0; i < patch.nx; ++i)
          if (in_ball[static_cast<std::size_t>(j) * patch.nx + i])
            after += std::abs(target(i, j) - div2(box.i0 + i, box.j0 + j)) * patch.cell_area();
      rep.residual_after = after;
    }
    out.nodes.push_back(rep);
  }
  return out;
}

}  // namespace elbranch
