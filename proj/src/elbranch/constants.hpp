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

namespace elbranch {

/// Exponents of the approximating energy
///   E_eps(u) = eps^gamma1 * int |u|^beta + eps^gamma2 * int |grad u|^2.
/// gamma2 is normalized to alpha + 1 in every dimension; only the ratio
/// gamma1/gamma2 is intrinsic.
struct ExponentSet {
  double alpha = 0;
  int d = 2;
  double beta = 0;
  double gamma1 = 0;
  double gamma2 = 0;
};

/// Transverse-profile constants (d = 2 only).
///   c0 = int_0^1 sqrt(t^beta - t) dt
///   C0 = int_0^1 t / sqrt(t^beta - t) dt
///   c  = (4 c0 alpha / (1 - alpha))^(1 - alpha) / alpha
struct ProfileConstants {
  double alpha = 0;
  double beta = 0;
  double c0 = 0;
  double C0 = 0;
  double c = 0;
  double quadrature_tol = 0;
  double c0_error = 0;  // quadrature error estimates
  double C0_error = 0;
};

ExponentSet exponents(double alpha, int d = 2);

ProfileConstants profile_constants(double alpha, double quadrature_tol = 1e-13);

/// Amplitude A > 0 minimizing eps^(alpha-1) A^(beta-1) m + 4 c0 eps^alpha A^(1+beta/2).
/// Returns 0 for m == 0.
double optimal_amplitude(double m, double eps, double alpha);
double optimal_amplitude(double m, double eps, const ProfileConstants& pc);

/// The objective above at a given amplitude.
double amplitude_objective(double m, double eps, double amplitude,
                           const ProfileConstants& pc);

/// Minimum of the amplitude objective; equals c * m^alpha for every eps.
double pointwise_cost(double m, double eps, double alpha);
double pointwise_cost(double m, double eps, const ProfileConstants& pc);

}  // namespace elbranch
