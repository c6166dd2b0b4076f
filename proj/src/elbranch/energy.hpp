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

#include "elbranch/constants.hpp"
#include <vector>

#include "elbranch/grid.hpp"

namespace elbranch {

/// Parameters of E_eps(u) = eps^(alpha-1) int rho_delta(|u|) + eps^(alpha+1) int |grad u|^2
/// with rho_delta(s) = (s^2 + delta^2)^(beta/2) - delta^beta.
struct EnergyParams {
  double alpha = 0.8;
  double eps = 0.01;
  double delta = 0.0;
  ExponentSet exponents;
};

/// Validates alpha (d = 2), eps > 0 and 0 <= delta < 1.
EnergyParams make_energy_params(double alpha, double eps, double delta = 0.0);

struct EnergyBreakdown {
  double concave_term = 0;    // eps^(alpha-1) int rho(|u|)
  double dirichlet_term = 0;  // eps^(alpha+1) int |grad u|^2
  double total = 0;
  ScalarField2D density;      // per-cell integrand; sum * cell area == total
};

/// Concave term from face-averaged cell values; Dirichlet term from face
/// differences of both components over interior stencils only.
EnergyBreakdown energy(const VectorField2D& u, const EnergyParams& p);

/// Total energy only (no density field).
double energy_total(const VectorField2D& u, const EnergyParams& p,
                    double* concave = nullptr, double* dirichlet = nullptr);

/// Total energy and its gradient with respect to every face value.
/// Requires delta > 0.
double energy_with_face_gradient(const VectorField2D& u, const EnergyParams& p,
                                 VectorField2D& grad);

/// Weights w_c = (beta/2) (|u0_c|^2 + delta^2)^(beta/2 - 1) of the quadratic
/// majorant of the concave term at u0:
///   rho_delta(|u|) <= rho_delta(|u0|) + w_c (|u|^2 - |u0|^2).
/// Requires delta > 0.
std::vector<double> majorant_weights(const VectorField2D& u0, const EnergyParams& p);

/// out = H v with H the (constant) Hessian of the majorant energy
/// eps^(alpha-1) sum area w_c |v_c|^2 + Dirichlet term.
void majorant_apply(const VectorField2D& v, const EnergyParams& p,
                    const std::vector<double>& weights, VectorField2D& out);

/// Gradient of psi -> E(grad(phi) + Rot grad(psi)) at every node. Requires delta > 0.
ScalarField2D energy_gradient_psi(const ScalarField2D& psi, const ScalarField2D& phi,
                                  const EnergyParams& p);

}  // namespace elbranch
