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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "elbranch/error.hpp"
#include "elbranch/grid.hpp"
#include "elbranch/poisson.hpp"

using namespace elbranch;

namespace {

ScalarField2D random_nodes(const GridSpec& g, unsigned seed, bool zero_boundary) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> n;
  ScalarField2D psi(g, Location::nodes);
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) {
      const bool edge = i == 0 || j == 0 || i == g.nx || j == g.ny;
      psi(i, j) = zero_boundary && edge ? 0.0 : n(rng);
    }
  return psi;
}

VectorField2D random_field(const GridSpec& g, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> n;
  VectorField2D u(g);
  for (double& v : u.ux_values()) v = n(rng);
  for (double& v : u.uy_values()) v = n(rng);
  return u;
}

}  // namespace

TEST_CASE("grid construction and validation") {
  const GridSpec g = make_grid(8, 4, -1, 0, 1, 2);
  CHECK(g.hx == doctest::Approx(0.25));
  CHECK(g.hy == doctest::Approx(0.5));
  CHECK(g.x_max() == doctest::Approx(1));
  CHECK_THROWS_AS(make_grid(2, 8, 0, 0, 1, 1), Error);
  CHECK_THROWS_AS(make_grid(8, 8, 1, 0, 0, 1), Error);
  ScalarField2D c(g), n(g, Location::nodes);
  CHECK(c.size() == 32u);
  CHECK(n.size() == 45u);
  VectorField2D u(g);
  CHECK(u.ux_values().size() == 9u * 4u);
  CHECK(u.uy_values().size() == 8u * 5u);
}

TEST_CASE("divergence of a curl vanishes") {
  const GridSpec g = make_grid(13, 9, 0, 0, 1.3, 0.7);
  const VectorField2D u = curl_apply(random_nodes(g, 1, false));
  CHECK(divergence(u).max_abs() < 1e-10);
  const VectorField2D w = curl_apply(random_nodes(g, 2, true));
  CHECK(w.max_boundary_abs() < 1e-14);
}

TEST_CASE("divergence theorem on the staggered grid") {
  const GridSpec g = make_grid(10, 7, 0, 0, 1, 1);
  const VectorField2D u = random_field(g, 3);
  CHECK(divergence(u).integral() == doctest::Approx(boundary_flux(u)).epsilon(1e-12));
}

TEST_CASE("gradient is minus the adjoint of divergence on interior faces") {
  const GridSpec g = make_grid(9, 11, 0, 0, 1, 1);
  std::mt19937 rng(4);
  std::normal_distribution<double> n;
  ScalarField2D phi(g);
  for (double& v : phi.values()) v = n(rng);
  VectorField2D u = random_field(g, 5);
  u.zero_boundary();
  // sum_cells phi div(u) area == -<grad phi, u>
  ScalarField2D d = divergence(u);
  double lhs = 0;
  for (std::size_t k = 0; k < d.size(); ++k) lhs += phi.values()[k] * d.values()[k];
  lhs *= g.cell_area();
  CHECK(lhs == doctest::Approx(-inner(gradient(phi), u)).epsilon(1e-12));
}

TEST_CASE("curl_adjoint is the transpose of curl_apply") {
  const GridSpec g = make_grid(7, 6, 0, 0, 1, 1);
  const ScalarField2D psi = random_nodes(g, 6, false);
  const VectorField2D v = random_field(g, 7);
  const VectorField2D cu = curl_apply(psi);
  double lhs = 0;
  for (std::size_t k = 0; k < v.ux_values().size(); ++k) lhs += cu.ux_values()[k] * v.ux_values()[k];
  for (std::size_t k = 0; k < v.uy_values().size(); ++k) lhs += cu.uy_values()[k] * v.uy_values()[k];
  const ScalarField2D ca = curl_adjoint(v);
  double rhs = 0;
  for (std::size_t k = 0; k < psi.size(); ++k) rhs += psi.values()[k] * ca.values()[k];
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("stream function recovers a divergence-free field") {
  const GridSpec g = make_grid(12, 10, 0, 0, 1, 1);
  const VectorField2D u = curl_apply(random_nodes(g, 8, true));
  VectorField2D back = curl_apply(stream_function(u));
  back -= u;
  CHECK(back.max_abs() < 1e-10);
}

TEST_CASE("field mass of a constant field") {
  const GridSpec g = make_grid(8, 8, 0, 0, 2, 1);
  VectorField2D u(g);
  for (double& v : u.ux_values()) v = 3;
  for (double& v : u.uy_values()) v = 4;
  CHECK(field_mass(u) == doctest::Approx(5 * 2));
}

TEST_CASE("Neumann Poisson with a manufactured solution") {
  using std::numbers::pi;
  for (int n : {32, 64, 48}) {
    const GridSpec g = make_grid(n, n, 0, 0, 1, 1);
    ScalarField2D rhs(g), exact(g);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const Point p = g.cell_center(i, j);
        exact(i, j) = std::cos(pi * p.x) * std::cos(2 * pi * p.y);
        rhs(i, j) = -5 * pi * pi * exact(i, j);
      }
    // Remove the discrete mean so the data are compatible.
    const double mean = rhs.integral();
    for (double& v : rhs.values()) v -= mean;
    PoissonStats st;
    const ScalarField2D phi = poisson_solve(rhs, BoundaryCondition::neumann_zero_flux, 1e-10, &st);
    CHECK(st.residual <= 1e-10);
    ScalarField2D r = apply_laplacian(phi, BoundaryCondition::neumann_zero_flux);
    r -= rhs;
    CHECK(r.norm_l2() <= 1e-9 * rhs.norm_l2());
    double err = 0;
    for (std::size_t k = 0; k < phi.size(); ++k)
      err = std::max(err, std::abs(phi.values()[k] - exact.values()[k]));
    CHECK(err < 20.0 / (n * n));  // second order
  }
}

TEST_CASE("Dirichlet Poisson residual") {
  const GridSpec g = make_grid(40, 24, 0, 0, 1, 0.6);
  ScalarField2D rhs(g, Location::cells, 1.0);
  PoissonStats st;
  const ScalarField2D phi = poisson_solve(rhs, BoundaryCondition::dirichlet_zero, 1e-11, &st);
  ScalarField2D r = apply_laplacian(phi, BoundaryCondition::dirichlet_zero);
  r -= rhs;
  CHECK(r.norm_l2() <= 1e-10 * rhs.norm_l2());
  CHECK(phi.max_abs() > 0);
}

TEST_CASE("incompatible Neumann data are rejected") {
  const GridSpec g = make_grid(16, 16, 0, 0, 1, 1);
  ScalarField2D rhs(g, Location::cells, 1.0);
  try {
    poisson_solve(rhs, BoundaryCondition::neumann_zero_flux, 1e-10);
    FAIL("expected a compatibility error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::compatibility);
  }
}

TEST_CASE("masked Poisson solves") {
  const GridSpec g = make_grid(24, 24, 0, 0, 1, 1);
  std::vector<char> mask(g.nx * g.ny, 0);
  ScalarField2D rhs(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const Point p = g.cell_center(i, j);
      if (std::hypot(p.x - 0.5, p.y - 0.5) < 0.3) {
        mask[j * g.nx + i] = 1;
        rhs(i, j) = p.x - 0.5;
      }
    }
  for (auto bc : {BoundaryCondition::dirichlet_zero, BoundaryCondition::neumann_zero_flux}) {
    ScalarField2D f = rhs;
    if (bc == BoundaryCondition::neumann_zero_flux) {
      double s = 0;
      int cnt = 0;
      for (std::size_t k = 0; k < mask.size(); ++k)
        if (mask[k]) s += f.values()[k], ++cnt;
      for (std::size_t k = 0; k < mask.size(); ++k)
        if (mask[k]) f.values()[k] -= s / cnt;
    }
    const ScalarField2D w = masked_poisson_solve(f, mask, bc, 1e-12);
    ScalarField2D r = apply_masked_laplacian(w, mask, bc);
    double err = 0;
    for (std::size_t k = 0; k < mask.size(); ++k) {
      if (mask[k]) err = std::max(err, std::abs(r.values()[k] - f.values()[k]));
      else CHECK(w.values()[k] == 0.0);
    }
    CHECK(err < 1e-9);
  }
}

TEST_CASE("Helmholtz projection hits the prescribed divergence") {
  const GridSpec g = make_grid(32, 32, 0, 0, 1, 1);
  ScalarField2D f(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const Point p = g.cell_center(i, j);
      f(i, j) = std::exp(-50 * (std::pow(p.x - 0.3, 2) + std::pow(p.y - 0.5, 2))) -
                std::exp(-50 * (std::pow(p.x - 0.7, 2) + std::pow(p.y - 0.5, 2)));
    }
  const double mean = f.integral();
  for (double& v : f.values()) v -= mean;
  const VectorField2D u0 = random_field(g, 9);
  const HelmholtzResult h = helmholtz_project(u0, f);
  ScalarField2D d = divergence(h.u);
  d -= f;
  CHECK(d.max_abs() < 1e-9 * std::max(1.0, f.max_abs()));
  CHECK(h.u.max_boundary_abs() < 1e-14);
  // Projection: u0 - u is orthogonal to every zero-flux divergence-free field.
  VectorField2D diff = u0;
  diff -= h.u;
  const VectorField2D w = curl_apply(random_nodes(g, 10, true));
  CHECK(std::abs(inner(diff, w)) < 1e-8 * norm_l2(diff) * norm_l2(w));
}
