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

#include "elbranch/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "elbranch/error.hpp"

namespace elbranch {

void GridSpec::validate() const {
  if (nx < 4 || ny < 4 || !(hx > 0) || !(hy > 0) || !std::isfinite(hx) ||
      !std::isfinite(hy) || !std::isfinite(origin.x) || !std::isfinite(origin.y)) {
    std::ostringstream os;
    os << "invalid grid: need nx, ny >= 4 and hx, hy > 0 (got nx=" << nx << " ny=" << ny
       << " hx=" << hx << " hy=" << hy << ")";
    fail(ErrorCode::domain, os.str());
  }
}

GridSpec make_grid(int nx, int ny, double x0, double y0, double x1, double y1) {
  GridSpec g;
  g.nx = nx;
  g.ny = ny;
  g.hx = (x1 - x0) / nx;
  g.hy = (y1 - y0) / ny;
  g.origin = {x0, y0};
  g.validate();
  return g;
}

bool operator==(const Point& a, const Point& b) { return a.x == b.x && a.y == b.y; }

// ---------------------------------------------------------------- scalar

ScalarField2D::ScalarField2D(const GridSpec& spec, Location loc, double value)
    : spec_(spec), loc_(loc) {
  spec_.validate();
  values_.assign(static_cast<std::size_t>(width()) * height(), value);
}

double ScalarField2D::sum() const {
  double s = 0;
  for (double v : values_) s += v;
  return s;
}

double ScalarField2D::integral() const {
  if (loc_ == Location::cells) return sum() * spec_.cell_area();
  double s = 0;
  const int w = width(), h = height();
  for (int j = 0; j < h; ++j) {
    const double wy = (j == 0 || j == h - 1) ? 0.5 : 1.0;
    for (int i = 0; i < w; ++i) {
      const double wx = (i == 0 || i == w - 1) ? 0.5 : 1.0;
      s += wx * wy * (*this)(i, j);
    }
  }
  return s * spec_.cell_area();
}

double ScalarField2D::max_abs() const {
  double m = 0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double ScalarField2D::norm_l1() const {
  double s = 0;
  for (double v : values_) s += std::abs(v);
  return s * spec_.cell_area();
}

double ScalarField2D::norm_l2() const {
  double s = 0;
  for (double v : values_) s += v * v;
  return std::sqrt(s * spec_.cell_area());
}

bool ScalarField2D::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

namespace {
void check_same(const ScalarField2D& a, const ScalarField2D& b) {
  require(a.spec() == b.spec() && a.location() == b.location(), ErrorCode::dimension,
          "scalar fields live on different grids");
}
void check_same(const VectorField2D& a, const VectorField2D& b) {
  require(a.spec() == b.spec(), ErrorCode::dimension, "vector fields live on different grids");
}
}  // namespace

ScalarField2D& ScalarField2D::operator+=(const ScalarField2D& o) {
  check_same(*this, o);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
  return *this;
}

ScalarField2D& ScalarField2D::operator-=(const ScalarField2D& o) {
  check_same(*this, o);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
  return *this;
}

ScalarField2D& ScalarField2D::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

// ---------------------------------------------------------------- vector

VectorField2D::VectorField2D(const GridSpec& spec) : spec_(spec) {
  spec_.validate();
  ux_.assign(static_cast<std::size_t>(spec_.nx + 1) * spec_.ny, 0.0);
  uy_.assign(static_cast<std::size_t>(spec_.nx) * (spec_.ny + 1), 0.0);
}

Point VectorField2D::cell_value(int i, int j) const {
  return {0.5 * (ux(i, j) + ux(i + 1, j)), 0.5 * (uy(i, j) + uy(i, j + 1))};
}

double VectorField2D::max_abs() const {
  double m = 0;
  for (double v : ux_) m = std::max(m, std::abs(v));
  for (double v : uy_) m = std::max(m, std::abs(v));
  return m;
}

bool VectorField2D::all_finite() const {
  auto fin = [](double v) { return std::isfinite(v); };
  return std::all_of(ux_.begin(), ux_.end(), fin) && std::all_of(uy_.begin(), uy_.end(), fin);
}

double VectorField2D::max_boundary_abs() const {
  double m = 0;
  for (int j = 0; j < spec_.ny; ++j)
    m = std::max({m, std::abs(ux(0, j)), std::abs(ux(spec_.nx, j))});
  for (int i = 0; i < spec_.nx; ++i)
    m = std::max({m, std::abs(uy(i, 0)), std::abs(uy(i, spec_.ny))});
  return m;
}

void VectorField2D::zero_boundary() {
  for (int j = 0; j < spec_.ny; ++j) ux(0, j) = ux(spec_.nx, j) = 0.0;
  for (int i = 0; i < spec_.nx; ++i) uy(i, 0) = uy(i, spec_.ny) = 0.0;
}

VectorField2D& VectorField2D::operator+=(const VectorField2D& o) {
  axpy(1.0, o);
  return *this;
}

VectorField2D& VectorField2D::operator-=(const VectorField2D& o) {
  axpy(-1.0, o);
  return *this;
}

VectorField2D& VectorField2D::operator*=(double s) {
  for (double& v : ux_) v *= s;
  for (double& v : uy_) v *= s;
  return *this;
}

void VectorField2D::axpy(double s, const VectorField2D& o) {
  check_same(*this, o);
  for (std::size_t k = 0; k < ux_.size(); ++k) ux_[k] += s * o.ux_[k];
  for (std::size_t k = 0; k < uy_.size(); ++k) uy_[k] += s * o.uy_[k];
}

double inner(const VectorField2D& a, const VectorField2D& b) {
  check_same(a, b);
  double s = 0;
  const auto& ax = a.ux_values();
  const auto& bx = b.ux_values();
  for (std::size_t k = 0; k < ax.size(); ++k) s += ax[k] * bx[k];
  const auto& ay = a.uy_values();
  const auto& by = b.uy_values();
  for (std::size_t k = 0; k < ay.size(); ++k) s += ay[k] * by[k];
  return s * a.spec().cell_area();
}

double norm_l2(const VectorField2D& a) { return std::sqrt(inner(a, a)); }

// ---------------------------------------------------------------- operators

ScalarField2D divergence(const VectorField2D& u) {
  const GridSpec& g = u.spec();
  ScalarField2D d(g);
  const double ihx = 1.0 / g.hx, ihy = 1.0 / g.hy;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      d(i, j) = (u.ux(i + 1, j) - u.ux(i, j)) * ihx + (u.uy(i, j + 1) - u.uy(i, j)) * ihy;
  return d;
}

double boundary_flux(const VectorField2D& u) {
  const GridSpec& g = u.spec();
  double f = 0;
  for (int j = 0; j < g.ny; ++j) f += (u.ux(g.nx, j) - u.ux(0, j)) * g.hy;
  for (int i = 0; i < g.nx; ++i) f += (u.uy(i, g.ny) - u.uy(i, 0)) * g.hx;
  return f;
}

VectorField2D curl_apply(const ScalarField2D& psi) {
  require(psi.location() == Location::nodes, ErrorCode::dimension,
          "curl_apply expects a node-located potential of size (nx+1) x (ny+1)");
  const GridSpec& g = psi.spec();
  VectorField2D u(g);
  const double ihx = 1.0 / g.hx, ihy = 1.0 / g.hy;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) u.ux(i, j) = (psi(i, j + 1) - psi(i, j)) * ihy;
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) u.uy(i, j) = -(psi(i + 1, j) - psi(i, j)) * ihx;
  return u;
}

ScalarField2D curl_adjoint(const VectorField2D& gf) {
  const GridSpec& g = gf.spec();
  ScalarField2D out(g, Location::nodes);
  const double ihx = 1.0 / g.hx, ihy = 1.0 / g.hy;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) {
      const double v = gf.ux(i, j) * ihy;
      out(i, j + 1) += v;
      out(i, j) -= v;
    }
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double v = gf.uy(i, j) * ihx;
      out(i + 1, j) -= v;
      out(i, j) += v;
    }
  return out;
}

VectorField2D gradient(const ScalarField2D& phi) {
  require(phi.location() == Location::cells, ErrorCode::dimension,
          "gradient expects a cell-centered field");
  const GridSpec& g = phi.spec();
  VectorField2D u(g);
  const double ihx = 1.0 / g.hx, ihy = 1.0 / g.hy;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i) u.ux(i, j) = (phi(i, j) - phi(i - 1, j)) * ihx;
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) u.uy(i, j) = (phi(i, j) - phi(i, j - 1)) * ihy;
  return u;
}

ScalarField2D stream_function(const VectorField2D& u) {
  const GridSpec& g = u.spec();
  ScalarField2D psi(g, Location::nodes);
  // Bottom row from uy = -(dpsi/dx), then each column upward from ux = dpsi/dy.
  for (int i = 0; i < g.nx; ++i) psi(i + 1, 0) = psi(i, 0) - u.uy(i, 0) * g.hx;
  for (int i = 0; i <= g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) psi(i, j + 1) = psi(i, j) + u.ux(i, j) * g.hy;
  return psi;
}

double field_mass(const VectorField2D& u) {
  const GridSpec& g = u.spec();
  double m = 0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const Point c = u.cell_value(i, j);
      m += std::hypot(c.x, c.y);
    }
  return m * g.cell_area();
}

}  // namespace elbranch
