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

#include <memory>

#include "elbranch/grid.hpp"

namespace elbranch {

/// Fast inverse of P = 2 h^2 (a L^2 + b L), L the node Dirichlet Laplacian
/// (-Delta) on the interior nodes, diagonalized by a 2-D DST-I. Used to
/// precondition descent on the stream function.
class StreamPreconditioner {
 public:
  explicit StreamPreconditioner(const GridSpec& grid);
  ~StreamPreconditioner();
  StreamPreconditioner(const StreamPreconditioner&) = delete;
  StreamPreconditioner& operator=(const StreamPreconditioner&) = delete;

  void set_coefficients(double a, double b);
  /// out = P^{-1} in on interior nodes; boundary nodes of out are zero.
  void apply_inverse(const ScalarField2D& in, ScalarField2D& out);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace elbranch
