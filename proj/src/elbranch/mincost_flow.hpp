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

namespace elbranch {

/// Balanced transportation problem solved exactly by successive shortest
/// paths with node potentials (Dijkstra on reduced costs).
struct TransportResult {
  double cost = 0;
  /// Dual potentials with supply_potential[i] + demand_potential[j] <= cost(i, j),
  /// equality on the support of the plan, and
  /// sum supply[i]*supply_potential[i] + sum demand[j]*demand_potential[j] == cost.
  std::vector<double> supply_potential;
  std::vector<double> demand_potential;
  struct Flow {
    int from;
    int to;
    double mass;
  };
  std::vector<Flow> plan;
};

/// supply and demand must be non-negative with equal totals (relative 1e-10).
TransportResult solve_transport(const std::vector<double>& supply,
                                const std::vector<double>& demand,
                                const std::function<double(int, int)>& cost);

}  // namespace elbranch
