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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "elbranch/error.hpp"
#include "elbranch/measures.hpp"
#include "oracles.hpp"

using namespace elbranch;

namespace {

// Random measure with n atoms in the unit square and total mass `total`.
AtomicMeasure random_measure(std::mt19937_64& rng, int n, double total) {
  std::uniform_real_distribution<double> u(0, 1), w(0.1, 1);
  AtomicMeasure m;
  double s = 0;
  for (int k = 0; k < n; ++k) {
    m.atoms.push_back({{u(rng), u(rng)}, w(rng)});
    s += m.atoms.back().mass;
  }
  for (Atom& a : m.atoms) a.mass *= total / s;
  return m;
}

std::vector<oracle::P2> to_p2(const AtomicMeasure& m) {
  std::vector<oracle::P2> out;
  for (const Atom& a : m.atoms) out.push_back({a.p.x, a.p.y, a.mass});
  return out;
}

}  // namespace

TEST_CASE("graph energy") {
  WeightedGraph one{{{{0, 0}, {3, 4}, 1.0}}};
  CHECK(graph_energy(one, 0.8) == doctest::Approx(5));
  WeightedGraph half{{{{0, 0}, {2, 0}, 0.5}}};
  CHECK(graph_energy(half, 0.8) == doctest::Approx(2 * std::pow(0.5, 0.8)));
  // Splitting a 2 theta edge into two theta edges costs a factor 2^(1 - alpha).
  WeightedGraph fat{{{{0, 0}, {1, 0}, 2.0}}};
  WeightedGraph split{{{{0, 0}, {1, 0}, 1.0}, {{0, 0}, {1, 0}, 1.0}}};
  CHECK(graph_energy(split, 0.7) / graph_energy(fat, 0.7) == doctest::Approx(std::pow(2, 0.3)));
}

TEST_CASE("graph validation") {
  CHECK_THROWS_AS((WeightedGraph{{{{0, 0}, {1, 0}, 0.0}}}.validate()), Error);
  CHECK_THROWS_AS((WeightedGraph{{{{0, 0}, {0, 0}, 1.0}}}.validate()), Error);
}

TEST_CASE("graph divergence: sinks positive") {
  WeightedGraph e{{{{0, 0}, {1, 0}, 0.3}}};
  const AtomicMeasure d = graph_divergence(e);
  REQUIRE(d.atoms.size() == 2);
  for (const Atom& a : d.atoms) CHECK(a.mass == doctest::Approx(a.p.x == 1 ? 0.3 : -0.3));
  WeightedGraph y{{{{0, 1}, {0.5, 0.5}, 0.5}, {{1, 1}, {0.5, 0.5}, 0.5}, {{0.5, 0.5}, {0.5, 0}, 1}}};
  const AtomicMeasure dy = graph_divergence(y);
  CHECK(dy.atoms.size() == 3);
  CHECK(dy.total() == doctest::Approx(0).scale(1));
  WeightedGraph loop{{{{0, 0}, {1, 0}, 1}, {{1, 0}, {0, 1}, 1}, {{0, 1}, {0, 0}, 1}}};
  CHECK(graph_divergence(loop).atoms.empty());
  const auto nodes = graph_nodes(y);
  CHECK(nodes.size() == 4);
}

TEST_CASE("W1 small examples") {
  AtomicMeasure a{{{{0.2, 0.3}, 1}}};
  CHECK(w1_distance(a, a) == 0.0);
  CHECK(w1_distance(AtomicMeasure{{{{0, 0}, 1}}}, AtomicMeasure{{{{1, 0}, 1}}}) ==
        doctest::Approx(1));
  AtomicMeasure mu{{{{0, 0}, 0.5}, {{1, 0}, 0.5}}}, nu{{{{0.5, 0}, 1}}};
  CHECK(w1_distance(mu, nu) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("W1 against the LP oracle, duality and metric axioms") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 40; ++t) {
    const double total = 0.5 + t * 0.05;
    const AtomicMeasure mu = random_measure(rng, 1 + t % 5, total);
    const AtomicMeasure nu = random_measure(rng, 1 + (t / 5) % 5, total);
    const AtomicMeasure xi = random_measure(rng, 1 + (t / 2) % 5, total);
    const W1Result r = w1_solve(mu, nu);
    CHECK(r.distance == doctest::Approx(oracle::w1_lp(to_p2(mu), to_p2(nu))).epsilon(1e-10));
    // Dual feasibility and zero gap.
    double dual = 0;
    for (std::size_t i = 0; i < mu.atoms.size(); ++i) dual += mu.atoms[i].mass * r.mu_potential[i];
    for (std::size_t j = 0; j < nu.atoms.size(); ++j) dual += nu.atoms[j].mass * r.nu_potential[j];
    CHECK(dual == doctest::Approx(r.distance).epsilon(1e-10));
    for (std::size_t i = 0; i < mu.atoms.size(); ++i)
      for (std::size_t j = 0; j < nu.atoms.size(); ++j)
        CHECK(r.mu_potential[i] + r.nu_potential[j] <=
              std::hypot(mu.atoms[i].p.x - nu.atoms[j].p.x, mu.atoms[i].p.y - nu.atoms[j].p.y) +
                  1e-12);
    CHECK(w1_distance(nu, mu) == doctest::Approx(r.distance).epsilon(1e-12));
    CHECK(r.distance <= w1_distance(mu, xi) + w1_distance(xi, nu) + 1e-12);
  }
}

TEST_CASE("W1 mass mismatch") {
  try {
    w1_distance(AtomicMeasure{{{{0, 0}, 1}}}, AtomicMeasure{{{{1, 0}, 1.1}}});
    FAIL("expected a compatibility error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::compatibility);
    CHECK(std::string(e.what()).find("1.1") != std::string::npos);
  }
}

TEST_CASE("g1 penalty") {
  AtomicMeasure fp{{{{0, 0}, 1}}}, fm{{{{1, 0}, 1}}};
  CHECK(g1_penalty(fp, fm, fp, fm, 0.8) == 0.0);
  AtomicMeasure mu{{{{0.5, 0}, 1}}}, nu{{{{1, 0.25}, 1}}};
  const double p = g1_penalty(mu, nu, fp, fm, 0.8, 2.0);
  CHECK(p == doctest::Approx(2 * std::pow(0.5, 0.6) + 2 * std::pow(0.25, 0.6)));
  AtomicMeasure mu2{{{{1.0, 0}, 1}}};
  CHECK(g1_penalty(mu2, fm, fp, fm, 0.8) / g1_penalty(mu, fm, fp, fm, 0.8) ==
        doctest::Approx(std::pow(2, 0.6)));
  CHECK_THROWS_AS(g1_penalty(mu, nu, fp, fm, 0.5), Error);
}

TEST_CASE("smoothing preserves mass") {
  const GridSpec g = make_grid(64, 64, 0, 0, 1, 1);
  CHECK(smooth_onto_grid(AtomicMeasure{}, 0.05, g).max_abs() == 0.0);
  AtomicMeasure one{{{{0.43, 0.61}, 1.0}}};
  CHECK(smooth_onto_grid(one, 0.05, g).integral() == doctest::Approx(1).epsilon(1e-12));
  AtomicMeasure dipole{{{{0.3, 0.5}, 1.0}, {{0.7, 0.5}, -1.0}}};
  CHECK(std::abs(smooth_onto_grid(dipole, 0.06, g).integral()) < 1e-12);
  const std::vector<double> sig{0.04, 0.08};
  CHECK(std::abs(smooth_onto_grid(dipole, sig, g).integral()) < 1e-12);
}

TEST_CASE("smoothing preconditions") {
  const GridSpec g = make_grid(64, 64, 0, 0, 1, 1);
  AtomicMeasure edge{{{{0.05, 0.5}, 1.0}}};
  try {
    smooth_onto_grid(edge, 0.05, g);
    FAIL("expected a geometry error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::geometry);
  }
  CHECK_NOTHROW(smooth_onto_grid(edge, 0.05, g, false));
  try {
    smooth_onto_grid(AtomicMeasure{{{{0.5, 0.5}, 1.0}}}, 0.01, g);
    FAIL("expected a domain error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::domain);
  }
  CHECK_THROWS_AS(smooth_onto_grid(AtomicMeasure{{{{1.5, 0.5}, 1.0}}}, 0.05, g, false), Error);
}

TEST_CASE("positive and negative parts") {
  AtomicMeasure f{{{{0, 0}, 1}, {{1, 0}, -2}, {{2, 0}, 0.5}}};
  CHECK(positive_part(f).total() == doctest::Approx(1.5));
  CHECK(negative_part(f).total() == doctest::Approx(2));
  CHECK(f.total_abs() == doctest::Approx(3.5));
}
