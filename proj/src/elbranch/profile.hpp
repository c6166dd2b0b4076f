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
#include <vector>

#include "elbranch/constants.hpp"
#include "elbranch/grid.hpp"
#include "elbranch/measures.hpp"

namespace elbranch {

/// Optimal transverse profile of a strip carrying flux theta. In rescaled
/// units t the profile is 1 on the plateau |t| <= plateau_halfwidth and then
/// follows z0' = -kappa sqrt(z0^beta - z0) down to 0 at t = plateau + T. The
/// physical intensity at signed distance s is amplitude * z(amplitude * s).
struct TransverseProfile {
  double alpha = 0;
  double beta = 0;
  double theta = 0;
  double eps = 0;
  double amplitude = 0;
  double kappa = 0;
  double plateau_halfwidth = 0;  // rescaled units
  double T = 0;                  // length of the decaying part, rescaled units
  double mass_integral = 0;      // int_0^T z0
  double first_moment = 0;       // int_0^inf z(t) t dt, plateau included
  double support_halfwidth = 0;  // physical: (plateau_halfwidth + T) / amplitude
  ProfileConstants constants;

  // Samples of the decaying part: z0(t_table[k]) = z_table[k]; the
  // parameter q_table[k] gives z0 = (1 - q^2)^(1/(1-beta)).
  std::vector<double> q_table;
  std::vector<double> t_table;
  std::vector<double> z_table;

  /// Rescaled profile z(t), symmetric in t.
  double z(double t) const;
  /// Physical intensity at signed distance s for amplitude scale * A.
  double intensity(double s, double amplitude_scale = 1.0) const;
  /// Distance from a segment end to the cap center that puts the cap's
  /// divergence barycenter on the end point.
  double cap_offset(double amplitude_scale = 1.0) const;
};

TransverseProfile solve_profile(double alpha, double theta, double eps, int n_samples = 4096);
TransverseProfile solve_profile(const ProfileConstants& pc, double theta, double eps,
                                int n_samples = 4096);

struct RasterOptions {
  double amplitude_scale = 1.0;  // A -> scale * A with the same mass
  int min_cells = 8;             // cells per support halfwidth
};

/// Strip of intensity amplitude * z(amplitude * s) along p0 -> p1, closed by
/// half-disk caps whose centers sit cap_offset() inside the segment.
VectorField2D rasterize_segment(Point p0, Point p1, const TransverseProfile& prof,
                                const GridSpec& grid, const RasterOptions& opt = {});
VectorField2D rasterize_segment(Point p0, Point p1, double theta, double eps, double alpha,
                                const GridSpec& grid, const RasterOptions& opt = {});

/// Field v supported in the cells whose centers lie within R of center, with
/// divergence(v) == g there: v = grad w + c where w solves the zero-Dirichlet
/// problem on the ball and c = Rot grad psi is divergence-free on the ball
/// cells and cancels grad w on the faces crossing the ball boundary.
struct NodeCorrection {
  VectorField2D v;
  VectorField2D gradient_part;
  VectorField2D rotational_part;
  ScalarField2D psi;  // stream function of rotational_part on the ball nodes, 0 elsewhere
  std::vector<char> mask;
  double poisson_residual = 0;
};
NodeCorrection node_correction(const ScalarField2D& g, Point center, double R,
                               double tol = 1e-11);

struct NodeReport {
  Point p;
  int degree = 0;
  double imbalance = 0;          // outflow - inflow
  double ball_radius = 0;
  double residual_before = 0;    // sum over the ball of |div u - target| * area
  double residual_after = 0;
  double correction_energy = 0;  // E_eps(v) with delta = 0
  bool corrected = false;
};

struct SynthesisResult {
  VectorField2D u;
  std::vector<NodeReport> nodes;
  std::vector<std::string> warnings;
  std::vector<double> support_halfwidth;  // per edge
};

/// Superposition of the edge strips; with correct_nodes every node of degree
/// >= 2 has its divergence replaced by imbalance times a normalized Gaussian
/// bump (width ball/6) using node_correction on a ball of radius
/// ball_factor * (largest incident support halfwidth).
SynthesisResult synthesize_graph(const WeightedGraph& g, double alpha, double eps,
                                 const GridSpec& grid, bool correct_nodes,
                                 double ball_factor = 1.5);

}  // namespace elbranch
