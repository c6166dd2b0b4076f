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

#include <span>
#include <vector>

#include "elbranch/grid.hpp"

namespace elbranch {

/// Oriented edge p0 -> p1 carrying flux w.
struct Edge {
  Point p0;
  Point p1;
  double w = 0;
  double length() const;
};

struct WeightedGraph {
  std::vector<Edge> edges;
  /// Throws ErrorCode::domain on non-positive weights or zero-length edges.
  void validate() const;
};

struct Atom {
  Point p;
  double mass = 0;
};

struct AtomicMeasure {
  std::vector<Atom> atoms;
  double total() const;
  double total_abs() const;
};

/// Distinct endpoints of a graph with their incident edges. Points closer than
/// tol * (bounding-box diameter) are merged.
struct GraphNode {
  Point p;
  std::vector<int> out_edges;
  std::vector<int> in_edges;
  double outflow = 0;
  double inflow = 0;
  int degree() const { return static_cast<int>(out_edges.size() + in_edges.size()); }
};
std::vector<GraphNode> graph_nodes(const WeightedGraph& g, double tol = 1e-9);

/// sum_h w_h^alpha |e_h|
double graph_energy(const WeightedGraph& g, double alpha);

/// Atom at every node with mass inflow - outflow (sinks positive); zero atoms dropped.
AtomicMeasure graph_divergence(const WeightedGraph& g);

/// Exact W1 with Euclidean ground cost. Masses must be non-negative with
/// equal totals (1e-10 relative).
struct W1Result {
  double distance = 0;
  std::vector<double> mu_potential;  // f_i, sum mu_i f_i + sum nu_j g_j == distance
  std::vector<double> nu_potential;  // g_j, f_i + g_j <= |x_i - y_j|
};
W1Result w1_solve(const AtomicMeasure& mu, const AtomicMeasure& nu);
double w1_distance(const AtomicMeasure& mu, const AtomicMeasure& nu);

/// C * W1(mu, fplus)^(2 alpha - 1) + C * W1(nu, fminus)^(2 alpha - 1); alpha > 1/2.
double g1_penalty(const AtomicMeasure& mu, const AtomicMeasure& nu, const AtomicMeasure& fplus,
                  const AtomicMeasure& fminus, double alpha, double C = 1.0);

/// Truncated (4 sigma) Gaussian bumps renormalized on the grid so each atom's
/// integral is exact. sigma >= 2 max(hx, hy); atoms need 3 sigma clearance
/// from the boundary unless check_clearance is false.
ScalarField2D smooth_onto_grid(const AtomicMeasure& f, double sigma, const GridSpec& grid,
                               bool check_clearance = true);
/// Per-atom widths (same length as f.atoms).
ScalarField2D smooth_onto_grid(const AtomicMeasure& f, std::span<const double> sigma,
                               const GridSpec& grid, bool check_clearance = true);

/// Reading of a parsed atom list as a positive and a negative part.
AtomicMeasure positive_part(const AtomicMeasure& f);
AtomicMeasure negative_part(const AtomicMeasure& f);

}  // namespace elbranch
