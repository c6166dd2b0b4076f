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

#include <functional>
#include <vector>

#include "elbranch/grid.hpp"

namespace elbranch {

enum class BoundaryCondition { neumann_zero_flux, dirichlet_zero };

struct PoissonStats {
  int cycles = 0;
  double residual = 0;  // final ||lap(phi) - rhs||_2 / ||rhs||_2
  bool used_cg = false;
};

/// Cell-centered 5-point Laplacian with the given boundary treatment.
/// Dirichlet places the zero value on the boundary faces (ghost = -phi).
ScalarField2D apply_laplacian(const ScalarField2D& phi, BoundaryCondition bc);

/// Solve lap(phi) = rhs to ||lap(phi) - rhs||_2 <= tol * ||rhs||_2 with
/// geometric multigrid V-cycles (red-black Gauss-Seidel), falling back to
/// conjugate gradients on grids that do not coarsen. Neumann solutions have
/// zero mean; Neumann data must integrate to zero within tol * ||rhs||_1.
ScalarField2D poisson_solve(const ScalarField2D& rhs, BoundaryCondition bc, double tol,
                            PoissonStats* stats = nullptr);

/// Poisson problem on an arbitrary cell subset of a grid. Faces between a
/// member cell and a non-member carry either zero flux (neumann) or a zero
/// value one cell away (dirichlet). Solved by Jacobi-preconditioned CG.
/// Entries of rhs outside the mask are ignored; the result is zero there.
ScalarField2D masked_poisson_solve(const ScalarField2D& rhs, const std::vector<char>& mask,
                                   BoundaryCondition bc, double tol,
                                   PoissonStats* stats = nullptr);

/// Apply the masked operator (for tests and residual checks).
ScalarField2D apply_masked_laplacian(const ScalarField2D& phi, const std::vector<char>& mask,
                                     BoundaryCondition bc);

/// Preconditioned conjugate gradients on a symmetric negative- or
/// positive-definite operator. When project_mean is set the iterates are kept
/// orthogonal to constants (singular Neumann problems).
struct CgResult {
  int iterations = 0;
  double residual = 0;  // relative
  bool converged = false;
};
CgResult conjugate_gradient(const std::function<void(const std::vector<double>&,
                                                     std::vector<double>&)>& apply,
                            const std::vector<double>& diag, const std::vector<double>& rhs,
                            std::vector<double>& x, double tol, int max_iter,
                            const std::vector<char>* active = nullptr,
                            bool project_mean = false);

/// Result of the two-potential decomposition u' = grad(phi) + Rot grad(psi).
struct HelmholtzResult {
  VectorField2D u;
  ScalarField2D phi;  // cells
  ScalarField2D psi;  // nodes, zero on the boundary
};

/// The L2-closest field to u with divergence f and zero normal trace.
/// Requires int f == 0 (within tol * ||f||_1).
HelmholtzResult helmholtz_project(const VectorField2D& u, const ScalarField2D& f,
                                  double tol = 1e-12);

}  // namespace elbranch
