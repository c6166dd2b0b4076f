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

#include "elbranch/constants.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "elbranch/error.hpp"

namespace elbranch {

namespace {

void check_alpha_2d(double alpha) {
  if (!(alpha > 0.5 && alpha < 1.0)) {
    std::ostringstream os;
    os << "alpha = " << alpha << " outside the admissible interval (1/2, 1)";
    fail(ErrorCode::domain, os.str());
  }
}

void check_eps(double eps) {
  require(eps > 0 && std::isfinite(eps), ErrorCode::domain,
          "eps must be a finite positive number");
}

// Both integrals become smooth in q after s = (1 - q^2)^(1/(1-beta)):
//   c0 = 2/(1-beta) int_0^1 q^2 (1-q^2)^(3 beta / (2 (1-beta))) dq
//   C0 = 2/(1-beta) int_0^1 (1-q^2)^((1 + beta/2)/(1-beta)) dq
// The remaining (1-q)^a factor at q = 1 is handled by tanh-sinh.
double integrate_unit(auto&& f, double tol, double* err) {
  boost::math::quadrature::tanh_sinh<double> ts;
  double l1 = 0;
  double e = 0;
  double v = ts.integrate(f, 0.0, 1.0, tol, &e, &l1);
  if (err) *err = e;
  return v;
}

}  // namespace

ExponentSet exponents(double alpha, int d) {
  if (d < 2) {
    fail(ErrorCode::domain, "dimension d must be >= 2, got " + std::to_string(d));
  }
  const double lower = 1.0 - 1.0 / d;
  if (!(alpha > lower && alpha < 1.0)) {
    std::ostringstream os;
    os << "alpha = " << alpha << " outside the admissible interval (" << lower
       << ", 1) for d = " << d;
    fail(ErrorCode::domain, os.str());
  }
  const double denom = 3.0 - d + alpha * (d - 1);
  ExponentSet e;
  e.alpha = alpha;
  e.d = d;
  e.beta = (2.0 - 2.0 * d + 2.0 * alpha * d) / denom;
  e.gamma2 = alpha + 1.0;
  e.gamma1 = e.gamma2 * (d - 1) * (alpha - 1.0) / denom;
  return e;
}

ProfileConstants profile_constants(double alpha, double quadrature_tol) {
  check_alpha_2d(alpha);
  require(quadrature_tol > 0, ErrorCode::domain, "quadrature_tol must be positive");
  const double beta = exponents(alpha, 2).beta;
  const double scale = 2.0 / (1.0 - beta);
  const double a = 1.5 * beta / (1.0 - beta);
  const double b = (1.0 + 0.5 * beta) / (1.0 - beta);

  ProfileConstants pc;
  pc.alpha = alpha;
  pc.beta = beta;
  pc.quadrature_tol = quadrature_tol;
  double e0 = 0, e1 = 0;
  pc.c0 = scale * integrate_unit(
                      [a](double q) {
                        const double w = 1.0 - q * q;
                        return w > 0 ? q * q * std::pow(w, a) : 0.0;
                      },
                      quadrature_tol, &e0);
  pc.C0 = scale * integrate_unit(
                      [b](double q) {
                        const double w = 1.0 - q * q;
                        return w > 0 ? std::pow(w, b) : 0.0;
                      },
                      quadrature_tol, &e1);
  pc.c0_error = scale * e0;
  pc.C0_error = scale * e1;
  const double tol_abs = 100.0 * quadrature_tol;
  if (!(pc.c0_error <= tol_abs * pc.c0) || !(pc.C0_error <= tol_abs * pc.C0)) {
    std::ostringstream os;
    os << "profile quadrature did not converge: error estimates " << pc.c0_error
       << " (c0), " << pc.C0_error << " (C0), requested " << quadrature_tol;
    fail(ErrorCode::numeric, os.str());
  }
  pc.c = std::pow(4.0 * pc.c0 * alpha / (1.0 - alpha), 1.0 - alpha) / alpha;
  return pc;
}

double optimal_amplitude(double m, double eps, const ProfileConstants& pc) {
  check_eps(eps);
  require(m >= 0 && std::isfinite(m), ErrorCode::domain, "mass flux must be >= 0");
  if (m == 0) return 0.0;
  const double beta = pc.beta;
  const double base = m * (1.0 - beta) / (eps * 2.0 * pc.c0 * (2.0 + beta));
  return std::pow(base, 2.0 / (4.0 - beta));
}

double optimal_amplitude(double m, double eps, double alpha) {
  return optimal_amplitude(m, eps, profile_constants(alpha));
}

double amplitude_objective(double m, double eps, double amplitude,
                           const ProfileConstants& pc) {
  const double beta = pc.beta;
  const double alpha = pc.alpha;
  return std::pow(eps, alpha - 1.0) * std::pow(amplitude, beta - 1.0) * m +
         4.0 * pc.c0 * std::pow(eps, alpha) * std::pow(amplitude, 1.0 + 0.5 * beta);
}

double pointwise_cost(double m, double eps, const ProfileConstants& pc) {
  check_eps(eps);
  require(m >= 0 && std::isfinite(m), ErrorCode::domain, "mass flux must be >= 0");
  if (m == 0) return 0.0;
  return amplitude_objective(m, eps, optimal_amplitude(m, eps, pc), pc);
}

double pointwise_cost(double m, double eps, double alpha) {
  return pointwise_cost(m, eps, profile_constants(alpha));
}

}  // namespace elbranch
