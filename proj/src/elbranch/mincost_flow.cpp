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

#include "elbranch/mincost_flow.hpp"

#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

#include "elbranch/error.hpp"

namespace elbranch {

TransportResult solve_transport(const std::vector<double>& supply,
                                const std::vector<double>& demand,
                                const std::function<double(int, int)>& cost) {
  const int n = static_cast<int>(supply.size());
  const int m = static_cast<int>(demand.size());
  double total_s = 0, total_d = 0;
  for (double a : supply) {
    require(a >= 0 && std::isfinite(a), ErrorCode::domain, "negative or non-finite supply");
    total_s += a;
  }
  for (double b : demand) {
    require(b >= 0 && std::isfinite(b), ErrorCode::domain, "negative or non-finite demand");
    total_d += b;
  }
  if (std::abs(total_s - total_d) > 1e-10 * std::max(total_s, total_d)) {
    std::ostringstream os;
    os.precision(17);
    os << "transport masses differ: " << total_s << " vs " << total_d;
    fail(ErrorCode::compatibility, os.str());
  }

  TransportResult res;
  res.supply_potential.assign(n, 0.0);
  res.demand_potential.assign(m, 0.0);
  if (n == 0 || m == 0 || total_s == 0) return res;

  std::vector<double> c(static_cast<std::size_t>(n) * m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) c[static_cast<std::size_t>(i) * m + j] = cost(i, j);

  // Demands are rescaled so both sides sum to the same floating value.
  std::vector<double> rem_s = supply;
  std::vector<double> rem_d = demand;
  for (double& b : rem_d) b *= total_s / total_d;
  const double eps_mass = 1e-14 * total_s;

  std::vector<double> x(static_cast<std::size_t>(n) * m, 0.0);
  // Node ids: supplies 0..n-1, demands n..n+m-1.
  const int nn = n + m;
  std::vector<double> pot(nn, 0.0), dist(nn);
  std::vector<int> prev(nn);
  std::vector<char> done(nn);
  const double inf = std::numeric_limits<double>::infinity();

  auto remaining = [&] {
    double s = 0;
    for (double a : rem_s) s += a;
    return s;
  };

  int guard = 0;
  while (remaining() > eps_mass) {
    if (++guard > 4 * (n + m) + 100) fail(ErrorCode::numeric, "min-cost flow did not terminate");
    std::fill(dist.begin(), dist.end(), inf);
    std::fill(prev.begin(), prev.end(), -1);
    std::fill(done.begin(), done.end(), 0);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    for (int i = 0; i < n; ++i)
      if (rem_s[i] > eps_mass) {
        dist[i] = 0;
        heap.push({0.0, i});
      }
    int target = -1;
    double target_dist = inf;
    while (!heap.empty()) {
      auto [d, v] = heap.top();
      heap.pop();
      if (done[v]) continue;
      done[v] = 1;
      if (v >= n && rem_d[v - n] > eps_mass) {
        target = v;
        target_dist = d;
        break;
      }
      if (v < n) {
        for (int j = 0; j < m; ++j) {
          const int w = n + j;
          if (done[w]) continue;
          const double rc = std::max(0.0, c[static_cast<std::size_t>(v) * m + j] + pot[v] - pot[w]);
          if (d + rc < dist[w]) {
            dist[w] = d + rc;
            prev[w] = v;
            heap.push({dist[w], w});
          }
        }
      } else {
        const int j = v - n;
        for (int i = 0; i < n; ++i) {
          if (done[i] || x[static_cast<std::size_t>(i) * m + j] <= 0) continue;
          const double rc = std::max(0.0, -c[static_cast<std::size_t>(i) * m + j] + pot[v] - pot[i]);
          if (d + rc < dist[i]) {
            dist[i] = d + rc;
            prev[i] = v;
            heap.push({dist[i], i});
          }
        }
      }
    }
    if (target < 0) fail(ErrorCode::numeric, "min-cost flow: no augmenting path");
    for (int v = 0; v < nn; ++v) pot[v] += std::min(dist[v], target_dist);

    // Bottleneck along the path.
    double amount = rem_d[target - n];
    int v = target;
    while (prev[v] >= 0) {
      const int u = prev[v];
      if (u >= n) amount = std::min(amount, x[static_cast<std::size_t>(v) * m + (u - n)]);
      v = u;
    }
    amount = std::min(amount, rem_s[v]);
    const int start = v;
    v = target;
    while (prev[v] >= 0) {
      const int u = prev[v];
      if (u < n) x[static_cast<std::size_t>(u) * m + (v - n)] += amount;
      else x[static_cast<std::size_t>(v) * m + (u - n)] -= amount;
      v = u;
    }
    rem_s[start] -= amount;
    rem_d[target - n] -= amount;
  }

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      const double f = x[static_cast<std::size_t>(i) * m + j];
      if (f > eps_mass) {
        res.plan.push_back({i, j, f});
        res.cost += f * c[static_cast<std::size_t>(i) * m + j];
      }
    }
  for (int i = 0; i < n; ++i) res.supply_potential[i] = -pot[i];
  for (int j = 0; j < m; ++j) res.demand_potential[j] = pot[n + j];
  return res;
}

}  // namespace elbranch
