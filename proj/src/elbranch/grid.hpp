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

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace elbranch {

struct Point {
  double x = 0;
  double y = 0;
};

/// Uniform rectangular grid of nx x ny cells covering
/// [origin.x, origin.x + nx*hx] x [origin.y, origin.y + ny*hy].
struct GridSpec {
  int nx = 0;
  int ny = 0;
  double hx = 0;
  double hy = 0;
  Point origin;

  /// Throws ErrorCode::domain unless nx, ny >= 4 and hx, hy > 0.
  void validate() const;

  double cell_area() const { return hx * hy; }
  double x_max() const { return origin.x + nx * hx; }
  double y_max() const { return origin.y + ny * hy; }
  Point cell_center(int i, int j) const {
    return {origin.x + (i + 0.5) * hx, origin.y + (j + 0.5) * hy};
  }
  Point node(int i, int j) const { return {origin.x + i * hx, origin.y + j * hy}; }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Uniform grid over the rectangle [x0, x1] x [y0, y1].
GridSpec make_grid(int nx, int ny, double x0, double y0, double x1, double y1);

bool operator==(const Point& a, const Point& b);

enum class Location { cells, nodes };

/// Scalar samples at cell centers (nx x ny) or at grid nodes
/// ((nx+1) x (ny+1)); row-major with y outer.
class ScalarField2D {
 public:
  ScalarField2D() = default;
  explicit ScalarField2D(const GridSpec& spec, Location loc = Location::cells,
                         double value = 0.0);

  const GridSpec& spec() const { return spec_; }
  Location location() const { return loc_; }
  int width() const { return loc_ == Location::cells ? spec_.nx : spec_.nx + 1; }
  int height() const { return loc_ == Location::cells ? spec_.ny : spec_.ny + 1; }
  std::size_t size() const { return values_.size(); }

  double& operator()(int i, int j) { return values_[static_cast<std::size_t>(j) * width() + i]; }
  double operator()(int i, int j) const {
    return values_[static_cast<std::size_t>(j) * width() + i];
  }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  /// Sum of values times cell area (cells) or trapezoid weights (nodes).
  double integral() const;
  double sum() const;
  double max_abs() const;
  double norm_l1() const;  // sum |v| * cell area (cells only)
  double norm_l2() const;  // sqrt(sum v^2 * cell area)
  bool all_finite() const;

  ScalarField2D& operator+=(const ScalarField2D& o);
  ScalarField2D& operator-=(const ScalarField2D& o);
  ScalarField2D& operator*=(double s);

 private:
  GridSpec spec_{};
  Location loc_ = Location::cells;
  std::vector<double> values_;
};

/// MAC-staggered vector field: ux on vertical faces ((nx+1) x ny),
/// uy on horizontal faces (nx x (ny+1)). Boundary faces hold the normal trace.
class VectorField2D {
 public:
  VectorField2D() = default;
  explicit VectorField2D(const GridSpec& spec);

  const GridSpec& spec() const { return spec_; }

  double& ux(int i, int j) { return ux_[static_cast<std::size_t>(j) * (spec_.nx + 1) + i]; }
  double ux(int i, int j) const { return ux_[static_cast<std::size_t>(j) * (spec_.nx + 1) + i]; }
  double& uy(int i, int j) { return uy_[static_cast<std::size_t>(j) * spec_.nx + i]; }
  double uy(int i, int j) const { return uy_[static_cast<std::size_t>(j) * spec_.nx + i]; }

  std::vector<double>& ux_values() { return ux_; }
  const std::vector<double>& ux_values() const { return ux_; }
  std::vector<double>& uy_values() { return uy_; }
  const std::vector<double>& uy_values() const { return uy_; }

  /// Face-averaged components at a cell center.
  Point cell_value(int i, int j) const;

  double max_abs() const;
  bool all_finite() const;
  /// Largest |normal trace| over the boundary faces.
  double max_boundary_abs() const;
  void zero_boundary();

  VectorField2D& operator+=(const VectorField2D& o);
  VectorField2D& operator-=(const VectorField2D& o);
  VectorField2D& operator*=(double s);
  /// this += s * o
  void axpy(double s, const VectorField2D& o);

 private:
  GridSpec spec_{};
  std::vector<double> ux_;
  std::vector<double> uy_;
};

/// Face inner product weighted by the cell area.
double inner(const VectorField2D& a, const VectorField2D& b);
double norm_l2(const VectorField2D& a);

/// Cell-centered finite-volume divergence including boundary faces.
ScalarField2D divergence(const VectorField2D& u);

/// Net outward flux through the domain boundary.
double boundary_flux(const VectorField2D& u);

/// Rot grad psi = (d psi/dy, -d psi/dx) from node values; divergence-free on the MAC grid.
VectorField2D curl_apply(const ScalarField2D& psi);

/// Adjoint of curl_apply in the unweighted Euclidean inner products.
ScalarField2D curl_adjoint(const VectorField2D& g);

/// Gradient of a cell field on interior faces; boundary faces are zero.
VectorField2D gradient(const ScalarField2D& phi);

/// Node potential psi with curl_apply(psi) == u, psi = 0 at the origin node.
/// u must be divergence-free with zero normal trace.
ScalarField2D stream_function(const VectorField2D& u);

/// Total mass int |u| from face-averaged cell values.
double field_mass(const VectorField2D& u);

}  // namespace elbranch
