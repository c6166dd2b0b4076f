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

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "elbranch/energy.hpp"
#include "elbranch/grid.hpp"
#include "elbranch/measures.hpp"

namespace elbranch {

enum class ConstraintMode { exact, quadratic, w1 };
enum class InitKind { zero, random, warm_start };
/// gradient: metric-preconditioned steepest descent; lbfgs: limited-memory
/// quasi-Newton on top of the metric; majorize: exact mode only, each step
/// minimizes (approximately, by preconditioned CG) the quadratic majorant of
/// the energy at the current iterate.
enum class DirectionKind { gradient, lbfgs, majorize };

struct SolverConfig {
  double alpha = 0.8;
  GridSpec grid;
  std::vector<double> eps_schedule;
  std::vector<double> delta_schedule;  // empty: min(0.1, eps^((alpha+1)/3))
  int steps_per_stage = 200;
  double step_size = 1.0;      // first trial step (preconditioned units in exact mode)
  double backtrack = 0.5;
  int max_backtracks = 40;
  double armijo = 1e-4;
  double momentum = 0.0;       // heavy-ball coefficient, 0 = plain descent
  DirectionKind direction = DirectionKind::gradient;
  int lbfgs_memory = 8;        // pairs kept by the limited-memory quasi-Newton direction
  int majorize_cg_iters = 60;  // inner CG iterations per majorize step
  double majorize_cg_tol = 1e-3;
  bool precondition = true;    // exact mode only
  ConstraintMode mode = ConstraintMode::exact;
  double lambda = 100.0;       // quadratic penalty weight
  double w1_C = 1.0;           // g1 penalty weight
  int w1_block = 4;            // cells per atom side in the w1 atomization
  std::optional<double> mass_bound_K;
  bool mass_guard_step = false;  // reject steps that leave the mass bound
  InitKind init = InitKind::random;
  std::uint64_t seed = 1;
  double init_amplitude = 0.05;  // relative to the source mass
  std::optional<VectorField2D> warm_start;
  double tol_grad = 1e-9;
  int restarts = 1;
  bool parallel_restarts = false;
  double sigma_factor = 0.5;            // sigma = factor * support halfwidth
  std::optional<double> sigma_override;

  /// Throws ErrorCode::domain on inconsistent settings.
  void validate() const;
};

struct TraceEntry {
  int restart = 0;
  int stage = 0;
  int iteration = 0;
  double eps = 0;
  double delta = 0;
  double concave = 0;
  double dirichlet = 0;
  double energy = 0;      // concave + dirichlet
  double objective = 0;   // energy + penalty (== energy in exact mode)
  double step = 0;
  double grad_norm = 0;
  double div_residual = 0;
  double mass = 0;
};

struct StageSummary {
  double eps = 0;
  double delta = 0;
  double sigma = 0;
  int iterations = 0;
  int accepted = 0;
  double objective = 0;
  double grad_norm = 0;
  bool failed = false;
  std::string message;
};

struct MassGuard {
  bool feasible = true;
  double mass = 0;
  double exceeded_by = 0;
};

/// Compares int |u| against K; never touches u.
MassGuard mass_guard(const VectorField2D& u, double K);

struct SolveResult {
  VectorField2D u;
  ScalarField2D psi;  // nodes (exact mode)
  ScalarField2D phi;  // cells (exact mode)
  ScalarField2D f;    // smoothed target divergence of the final stage
  std::vector<TraceEntry> energy_trace;
  std::vector<StageSummary> stages;
  EnergyBreakdown final_energy;    // final eps and delta
  EnergyBreakdown final_energy_delta0;  // final eps, delta = 0
  double div_residual = 0;
  double mass = 0;
  bool mass_feasible = true;
  bool converged = false;
  int best_restart = 0;
  std::vector<double> restart_objectives;
};

/// Geometric sequence eps0 ... eps_final of length n_stages.
std::vector<double> continuation_schedule(double eps0, double eps_final, int n_stages);
/// delta_k = min(0.1, eps_k^((alpha+1)/3)).
std::vector<double> default_deltas(const std::vector<double>& eps, double alpha);

/// Smoothing width used for a stage.
double stage_sigma(const SolverConfig& cfg, double eps, const AtomicMeasure& fplus,
                   const AtomicMeasure& fminus);

using TraceCallback = std::function<void(const TraceEntry&)>;

SolveResult solve(const SolverConfig& cfg, const AtomicMeasure& fplus,
                  const AtomicMeasure& fminus, const TraceCallback& on_iterate = {});

}  // namespace elbranch
