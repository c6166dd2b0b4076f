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

// Independent reference computations used by the unit and acceptance tests.
// None of these call into the library.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

// Exponent of the concave term in two dimensions.
inline double beta2(double alpha) { return (4 * alpha - 2) / (alpha + 1); }

// Substituting v = t^(1-beta) turns both profile integrals into Beta functions:
//   int_0^1 sqrt(t^beta - t) dt  = B(a + 1, 3/2) / (1 - beta),  a = 3 beta / (2 (1 - beta))
//   int_0^1 t / sqrt(t^beta - t) = B(b + 1, 1/2) / (1 - beta),  b = (1 + beta/2) / (1 - beta)
inline double c0(double alpha) {
  const double b = beta2(alpha);
  return std::beta(1.5 * b / (1 - b) + 1, 1.5) / (1 - b);
}
inline double C0(double alpha) {
  const double b = beta2(alpha);
  return std::beta((1 + 0.5 * b) / (1 - b) + 1, 0.5) / (1 - b);
}

// Golden-section minimization of a unimodal function on [a, b].
inline double golden_min(const std::function<double(double)>& f, double a, double b,
                         double rel_tol = 1e-15, int max_iter = 400) {
  const double r = (std::sqrt(5.0) - 1) / 2;
  double x1 = b - r * (b - a), x2 = a + r * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int k = 0; k < max_iter && (b - a) > rel_tol * std::abs(a + b); ++k) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

// Dense two-phase simplex with Bland's rule:
//   minimize c.x subject to A x = b, x >= 0, with b >= 0.
// Returns +inf when infeasible.
inline double simplex_min(std::vector<std::vector<double>> A, std::vector<double> b,
                          const std::vector<double>& c) {
  const int m = static_cast<int>(A.size());
  const int n = static_cast<int>(c.size());
  const double tol = 1e-12;
  // Tableau with artificials n..n+m-1 and the rhs in the last column.
  const int W = n + m + 1;
  std::vector<std::vector<double>> T(m, std::vector<double>(W, 0.0));
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) {
    if (b[i] < 0) {
      for (double& v : A[i]) v = -v;
      b[i] = -b[i];
    }
    for (int j = 0; j < n; ++j) T[i][j] = A[i][j];
    T[i][n + i] = 1;
    T[i][W - 1] = b[i];
    basis[i] = n + i;
  }
  auto pivot = [&](int r, int s) {
    const double p = T[r][s];
    for (double& v : T[r]) v /= p;
    for (int i = 0; i < m; ++i)
      if (i != r && T[i][s] != 0) {
        const double f = T[i][s];
        for (int j = 0; j < W; ++j) T[i][j] -= f * T[r][j];
      }
    basis[r] = s;
  };
  // Runs simplex for the given cost over columns [0, ncols).
  auto run = [&](const std::vector<double>& cost, int ncols) {
    for (int iter = 0; iter < 10000; ++iter) {
      int s = -1;
      for (int j = 0; j < ncols && s < 0; ++j) {
        double red = cost[j];
        for (int i = 0; i < m; ++i) red -= cost[basis[i]] * T[i][j];
        if (red < -tol) s = j;
      }
      if (s < 0) return;
      int r = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i)
        if (T[i][s] > tol) {
          const double ratio = T[i][W - 1] / T[i][s];
          if (ratio < best - tol || (std::abs(ratio - best) <= tol && basis[i] < basis[r])) {
            best = ratio;
            r = i;
          }
        }
      if (r < 0) return;  // unbounded; cannot happen for transport problems
      pivot(r, s);
    }
  };
  std::vector<double> phase1(n + m, 0.0);
  for (int i = 0; i < m; ++i) phase1[n + i] = 1;
  run(phase1, n + m);
  double infeas = 0;
  for (int i = 0; i < m; ++i)
    if (basis[i] >= n) infeas += T[i][W - 1];
  if (infeas > 1e-9) return std::numeric_limits<double>::infinity();
  // Drive zero-level artificials out of the basis where possible.
  for (int i = 0; i < m; ++i)
    if (basis[i] >= n)
      for (int j = 0; j < n; ++j)
        if (std::abs(T[i][j]) > 1e-9) {
          pivot(i, j);
          break;
        }
  std::vector<double> phase2(n + m, 0.0);
  for (int j = 0; j < n; ++j) phase2[j] = c[j];
  // Remaining artificial rows are redundant; their columns stay out (ncols = n).
  run(phase2, n);
  double v = 0;
  for (int i = 0; i < m; ++i)
    if (basis[i] < n) v += c[basis[i]] * T[i][W - 1];
  return v;
}

struct P2 {
  double x, y, m;
};

// W1 between equal-mass atomic measures as a transportation LP.
inline double w1_lp(const std::vector<P2>& mu, const std::vector<P2>& nu) {
  const int a = static_cast<int>(mu.size()), b = static_cast<int>(nu.size());
  std::vector<std::vector<double>> A;
  std::vector<double> rhs, cost(a * b);
  for (int i = 0; i < a; ++i) {
    std::vector<double> row(a * b, 0.0);
    for (int j = 0; j < b; ++j) row[i * b + j] = 1;
    A.push_back(row);
    rhs.push_back(mu[i].m);
  }
  for (int j = 0; j < b; ++j) {
    std::vector<double> row(a * b, 0.0);
    for (int i = 0; i < a; ++i) row[i * b + j] = 1;
    A.push_back(row);
    rhs.push_back(nu[j].m);
  }
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < b; ++j) cost[i * b + j] = std::hypot(mu[i].x - nu[j].x, mu[i].y - nu[j].y);
  return simplex_min(A, rhs, cost);
}

// Cheapest Y-shaped network joining sources s1 (mass m1), s2 (mass m2) to a
// sink at k, with the branch point on an n x n lattice of cell centers of
// [0, 1]^2. Degenerate Ys (branch point at an endpoint) are included.
struct YTree {
  double energy, bx, by;
};
inline YTree brute_force_y(double s1x, double s1y, double m1, double s2x, double s2y, double m2,
                           double kx, double ky, double alpha, int n = 200) {
  YTree best{std::numeric_limits<double>::infinity(), 0, 0};
  auto cost = [&](double x, double y) {
    return std::pow(m1, alpha) * std::hypot(x - s1x, y - s1y) +
           std::pow(m2, alpha) * std::hypot(x - s2x, y - s2y) +
           std::pow(m1 + m2, alpha) * std::hypot(x - kx, y - ky);
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double x = (i + 0.5) / n, y = (j + 0.5) / n;
      const double e = cost(x, y);
      if (e < best.energy) best = {e, x, y};
    }
  for (auto [x, y] : {std::pair{s1x, s1y}, std::pair{s2x, s2y}, std::pair{kx, ky}})
    if (double e = cost(x, y); e < best.energy) best = {e, x, y};
  return best;
}

// Symmetric difference quotient.
inline double central_difference(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2 * h);
}

// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
    sxx += x[k] * x[k];
    sxy += x[k] * y[k];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracle
