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

#include <string>
#include <utility>
#include <vector>

#include "elbranch/energy.hpp"
#include "elbranch/grid.hpp"
#include "elbranch/solver.hpp"

namespace elbranch {

enum class Axis { x, y };

struct Window {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
};

/// m(x) along an axis: for axis x, one entry per vertical face line
/// x_i in [x0, x1] holding sum_j ux(i, j) * hy over the cells with centers in
/// [y0, y1] (and symmetrically for y).
struct SliceProfile {
  Axis axis = Axis::x;
  double spacing = 0;
  std::vector<double> positions;
  std::vector<double> flux;
};

SliceProfile slice_flux(const VectorField2D& u, Axis axis, const Window& w);

/// Rectangle rule for int |m|^alpha.
double slice_alpha_bound(const SliceProfile& s, double alpha);

/// Sum of |m_{k+1} - m_k| along the slice.
double slice_total_variation(const SliceProfile& s);

/// Signed measure on [0, 1): atoms plus a piecewise-constant density on
/// equal bins (density[k] on [k/N, (k+1)/N)).
struct Measure1D {
  std::vector<std::pair<double, double>> atoms;  // (position, mass)
  std::vector<double> density;
};

/// Level sums S_n = sum_i |nu([i 2^-n, (i+1) 2^-n))|^alpha for n = 0..n_max.
std::vector<double> galpha_levels(const Measure1D& nu, double alpha, int n_max);
/// max_{n <= n_max} S_n; n_max <= 24.
double galpha_dyadic(const Measure1D& nu, double alpha, int n_max);

struct SliceReport {
  Window window;
  Axis axis = Axis::x;
  double bound = 0;          // int |m|^alpha
  double window_energy = 0;  // energy density integrated over the window
  double ratio = 0;          // c * bound / window_energy
  double total_variation = 0;
};

struct RunReport {
  double alpha = 0;
  double eps = 0;
  double delta = 0;
  double concave_term = 0;    // eps^(alpha-1) int |u|^beta
  double dirichlet_term = 0;  // eps^(alpha+1) int |grad u|^2
  double total = 0;
  double total_regularized = 0;  // with the final stage's delta
  double term_ratio = 0;         // concave / dirichlet (0 when dirichlet == 0)
  double mass = 0;
  double div_residual = 0;
  bool mass_feasible = true;
  bool converged = false;
  std::vector<SliceReport> slices;
};

SliceReport slice_report(const VectorField2D& u, const EnergyParams& p, Axis axis,
                         const Window& w);
RunReport run_report(const SolveResult& r, const SolverConfig& cfg,
                     const std::vector<std::pair<Axis, Window>>& windows = {});

/// Human-readable summary.
std::string format_report(const RunReport& r);

}  // namespace elbranch
