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

#include "elbranch/energy.hpp"

#include <cmath>
#include <sstream>

#include "elbranch/error.hpp"

namespace elbranch {

EnergyParams make_energy_params(double alpha, double eps, double delta) {
  EnergyParams p;
  p.exponents = exponents(alpha, 2);
  require(alpha > 0.5, ErrorCode::domain, "alpha must exceed 1/2");
  require(eps > 0 && std::isfinite(eps), ErrorCode::domain, "eps must be positive");
  require(delta >= 0 && delta < 1, ErrorCode::domain, "delta must lie in [0, 1)");
  p.alpha = alpha;
  p.eps = eps;
  p.delta = delta;
  return p;
}

namespace {

struct Terms {
  double concave = 0;
  double dirichlet = 0;
};

// One pass over the grid. density (per-cell energy, not yet divided by the
// cell area) and grad are optional.
// With weights set, the concave term is replaced by its quadratic majorant
// sum wc * w_c |u_c|^2 (no constant part).
Terms evaluate(const VectorField2D& u, const EnergyParams& p, std::vector<double>* cell_energy,
               VectorField2D* grad, const std::vector<double>* weights = nullptr) {
  const GridSpec& g = u.spec();
  const double area = g.cell_area();
  const double beta = p.exponents.beta;
  const double wc = std::pow(p.eps, p.alpha - 1.0) * area;
  const double wd = std::pow(p.eps, p.alpha + 1.0) * area;
  const double d2 = p.delta * p.delta;
  const double dbeta = p.delta > 0 ? std::pow(p.delta, beta) : 0.0;
  const double ihx = 1.0 / g.hx, ihy = 1.0 / g.hy;
  const int nx = g.nx, ny = g.ny;
  Terms t;

  auto add_cell = [&](int i, int j, double e) {
    if (cell_energy) (*cell_energy)[static_cast<std::size_t>(j) * nx + i] += e;
  };

  // Concave term and the cell-centered derivatives d ux/dx, d uy/dy.
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double cx = 0.5 * (u.ux(i, j) + u.ux(i + 1, j));
      const double cy = 0.5 * (u.uy(i, j) + u.uy(i, j + 1));
      const double base = cx * cx + cy * cy + d2;
      double rho = 0;
      if (weights) {
        const double w = (*weights)[static_cast<std::size_t>(j) * nx + i];
        rho = w * (cx * cx + cy * cy);
        if (grad) {
          const double dr = wc * w;
          grad->ux(i, j) += dr * cx;
          grad->ux(i + 1, j) += dr * cx;
          grad->uy(i, j) += dr * cy;
          grad->uy(i, j + 1) += dr * cy;
        }
      } else if (base > 0) {
        rho = std::pow(base, 0.5 * beta) - dbeta;
        if (grad) {
          const double dr = beta * std::pow(base, 0.5 * beta - 1.0) * wc * 0.5;
          grad->ux(i, j) += dr * cx;
          grad->ux(i + 1, j) += dr * cx;
          grad->uy(i, j) += dr * cy;
          grad->uy(i, j + 1) += dr * cy;
        }
      }
      const double ec = wc * rho;
      const double a = (u.ux(i + 1, j) - u.ux(i, j)) * ihx;
      const double b = (u.uy(i, j + 1) - u.uy(i, j)) * ihy;
      const double ed = wd * (a * a + b * b);
      t.concave += ec;
      t.dirichlet += ed;
      add_cell(i, j, ec + ed);
      if (grad) {
        grad->ux(i + 1, j) += 2 * wd * a * ihx;
        grad->ux(i, j) -= 2 * wd * a * ihx;
        grad->uy(i, j + 1) += 2 * wd * b * ihy;
        grad->uy(i, j) -= 2 * wd * b * ihy;
      }
    }

  // d ux/dy at nodes (i, j), j interior; a quarter of the term goes to each
  // adjacent cell, so boundary columns carry half weight.
  for (int j = 1; j < ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      const double a = (u.ux(i, j) - u.ux(i, j - 1)) * ihy;
      const int ncx = (i > 0 ? 1 : 0) + (i < nx ? 1 : 0);
      const double e = wd * a * a * 0.5 * ncx;
      t.dirichlet += e;
      if (cell_energy) {
        const double q = wd * a * a * 0.25;
        if (i > 0) { add_cell(i - 1, j - 1, q); add_cell(i - 1, j, q); }
        if (i < nx) { add_cell(i, j - 1, q); add_cell(i, j, q); }
      }
      if (grad) {
        const double ga = wd * a * ncx * ihy;
        grad->ux(i, j) += ga;
        grad->ux(i, j - 1) -= ga;
      }
    }

  // d uy/dx at nodes (i, j), i interior.
  for (int j = 0; j <= ny; ++j)
    for (int i = 1; i < nx; ++i) {
      const double a = (u.uy(i, j) - u.uy(i - 1, j)) * ihx;
      const int ncy = (j > 0 ? 1 : 0) + (j < ny ? 1 : 0);
      const double e = wd * a * a * 0.5 * ncy;
      t.dirichlet += e;
      if (cell_energy) {
        const double q = wd * a * a * 0.25;
        if (j > 0) { add_cell(i - 1, j - 1, q); add_cell(i, j - 1, q); }
        if (j < ny) { add_cell(i - 1, j, q); add_cell(i, j, q); }
      }
      if (grad) {
        const double ga = wd * a * ncy * ihx;
        grad->uy(i, j) += ga;
        grad->uy(i - 1, j) -= ga;
      }
    }
  return t;
}

void require_regularized(const EnergyParams& p) {
  if (!(p.delta > 0)) {
    fail(ErrorCode::precondition,
         "energy gradient needs delta > 0: the derivative beta |u|^(beta-2) u of the concave "
         "term is singular at u = 0");
  }
}

}  // namespace

EnergyBreakdown energy(const VectorField2D& u, const EnergyParams& p) {
  EnergyBreakdown out;
  out.density = ScalarField2D(u.spec());
  Terms t = evaluate(u, p, &out.density.values(), nullptr);
  out.density *= 1.0 / u.spec().cell_area();
  out.concave_term = t.concave;
  out.dirichlet_term = t.dirichlet;
  out.total = t.concave + t.dirichlet;
  return out;
}

double energy_total(const VectorField2D& u, const EnergyParams& p, double* concave,
                    double* dirichlet) {
  Terms t = evaluate(u, p, nullptr, nullptr);
  if (concave) *concave = t.concave;
  if (dirichlet) *dirichlet = t.dirichlet;
  return t.concave + t.dirichlet;
}

double energy_with_face_gradient(const VectorField2D& u, const EnergyParams& p,
                                 VectorField2D& grad) {
  require_regularized(p);
  grad = VectorField2D(u.spec());
  Terms t = evaluate(u, p, nullptr, &grad);
  return t.concave + t.dirichlet;
}

ScalarField2D energy_gradient_psi(const ScalarField2D& psi, const ScalarField2D& phi,
                                  const EnergyParams& p) {
  require_regularized(p);
  require(psi.location() == Location::nodes && phi.location() == Location::cells &&
              psi.spec() == phi.spec(),
          ErrorCode::dimension, "energy_gradient_psi: psi must be nodal and phi cell-centered");
  VectorField2D u = gradient(phi);
  u += curl_apply(psi);
  VectorField2D g;
  energy_with_face_gradient(u, p, g);
  return curl_adjoint(g);
}

std::vector<double> majorant_weights(const VectorField2D& u0, const EnergyParams& p) {
  require_regularized(p);
  const GridSpec& g = u0.spec();
  const double beta = p.exponents.beta;
  const double d2 = p.delta * p.delta;
  std::vector<double> w(static_cast<std::size_t>(g.nx) * g.ny);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const Point c = u0.cell_value(i, j);
      w[static_cast<std::size_t>(j) * g.nx + i] =
          0.5 * beta * std::pow(c.x * c.x + c.y * c.y + d2, 0.5 * beta - 1.0);
    }
  return w;
}

void majorant_apply(const VectorField2D& v, const EnergyParams& p,
                    const std::vector<double>& weights, VectorField2D& out) {
  require(weights.size() == static_cast<std::size_t>(v.spec().nx) * v.spec().ny,
          ErrorCode::dimension, "majorant weights do not match the grid");
  out = VectorField2D(v.spec());
  evaluate(v, p, nullptr, &out, &weights);
}

}  // namespace elbranch
