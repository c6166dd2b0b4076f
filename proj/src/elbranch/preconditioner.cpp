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

#include "elbranch/preconditioner.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <vector>

#include <fftw3.h>

#include "elbranch/error.hpp"

namespace elbranch {

namespace {
// FFTW's planner is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct StreamPreconditioner::Impl {
  GridSpec grid;
  int mx = 0, my = 0;  // interior node counts
  double* buf = nullptr;
  fftw_plan plan = nullptr;
  std::vector<double> lambda;  // eigenvalues of -Delta
  std::vector<double> inv;     // 1 / (P * normalization)
};

StreamPreconditioner::StreamPreconditioner(const GridSpec& grid) : impl_(std::make_unique<Impl>()) {
  grid.validate();
  Impl& m = *impl_;
  m.grid = grid;
  m.mx = grid.nx - 1;
  m.my = grid.ny - 1;
  const std::size_t n = static_cast<std::size_t>(m.mx) * m.my;
  m.buf = fftw_alloc_real(n);
  require(m.buf != nullptr, ErrorCode::numeric, "FFTW allocation failed");
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    m.plan = fftw_plan_r2r_2d(m.my, m.mx, m.buf, m.buf, FFTW_RODFT00, FFTW_RODFT00, FFTW_ESTIMATE);
  }
  require(m.plan != nullptr, ErrorCode::numeric, "FFTW plan creation failed");
  m.lambda.resize(n);
  for (int l = 0; l < m.my; ++l)
    for (int k = 0; k < m.mx; ++k) {
      const double sx = std::sin(std::numbers::pi * (k + 1) / (2.0 * grid.nx));
      const double sy = std::sin(std::numbers::pi * (l + 1) / (2.0 * grid.ny));
      m.lambda[static_cast<std::size_t>(l) * m.mx + k] =
          4 * sx * sx / (grid.hx * grid.hx) + 4 * sy * sy / (grid.hy * grid.hy);
    }
  set_coefficients(1.0, 0.0);
}

StreamPreconditioner::~StreamPreconditioner() {
  if (!impl_) return;
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (impl_->plan) fftw_destroy_plan(impl_->plan);
  if (impl_->buf) fftw_free(impl_->buf);
}

void StreamPreconditioner::set_coefficients(double a, double b) {
  Impl& m = *impl_;
  require(a >= 0 && b >= 0 && a + b > 0, ErrorCode::domain, "preconditioner coefficients");
  const double h2 = m.grid.hx * m.grid.hy;
  const double norm = 4.0 * m.grid.nx * m.grid.ny;  // DST-I round trip
  m.inv.resize(m.lambda.size());
  for (std::size_t k = 0; k < m.lambda.size(); ++k) {
    const double L = m.lambda[k];
    m.inv[k] = 1.0 / (2 * h2 * (a * L * L + b * L) * norm);
  }
}

void StreamPreconditioner::apply_inverse(const ScalarField2D& in, ScalarField2D& out) {
  Impl& m = *impl_;
  require(in.location() == Location::nodes && in.spec() == m.grid, ErrorCode::dimension,
          "preconditioner expects node data on its grid");
  if (!(out.spec() == m.grid) || out.location() != Location::nodes)
    out = ScalarField2D(m.grid, Location::nodes);
  for (int j = 0; j < m.my; ++j)
    for (int i = 0; i < m.mx; ++i) m.buf[static_cast<std::size_t>(j) * m.mx + i] = in(i + 1, j + 1);
  fftw_execute(m.plan);
  for (std::size_t k = 0; k < m.inv.size(); ++k) m.buf[k] *= m.inv[k];
  fftw_execute(m.plan);
  std::fill(out.values().begin(), out.values().end(), 0.0);
  for (int j = 0; j < m.my; ++j)
    for (int i = 0; i < m.mx; ++i) out(i + 1, j + 1) = m.buf[static_cast<std::size_t>(j) * m.mx + i];
}

}  // namespace elbranch
