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

// Exercises the shared library through its C header only.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>

#include "elbranch/elbranch.h"

namespace fs = std::filesystem;

TEST_CASE("status names and version") {
  CHECK(std::string(elb_status_name(ELB_OK)) == "ok");
  CHECK(std::string(elb_status_name(ELB_ERR_FORMAT)) == "format");
  CHECK(std::string(elb_version()) == "0.1.0");
}

TEST_CASE("constants and errors") {
  elb_exponent_set e;
  REQUIRE(elb_exponents(0.8, 2, &e) == ELB_OK);
  CHECK(e.beta == doctest::Approx(2.0 / 3.0));
  CHECK(std::string(elb_last_error()).empty());
  CHECK(elb_exponents(0.3, 2, &e) == ELB_ERR_DOMAIN);
  CHECK(std::string(elb_last_error()).find("alpha") != std::string::npos);
  CHECK(elb_exponents(0.8, 2, nullptr) == ELB_ERR_PRECONDITION);
  elb_profile_constants pc;
  REQUIRE(elb_profile_constants_compute(0.8, 0, &pc) == ELB_OK);
  CHECK(pc.c0 == doctest::Approx(32.0 / 105.0));
  double cost = 0;
  REQUIRE(elb_pointwise_cost(2.0, 0.01, 0.8, &cost) == ELB_OK);
  CHECK(cost == doctest::Approx(pc.c * std::pow(2.0, 0.8)));
}

TEST_CASE("fields, energy and BTF files") {
  elb_grid g;
  REQUIRE(elb_grid_make(8, 8, 0, 0, 1, 1, &g) == ELB_OK);
  CHECK(elb_grid_make(1, 8, 0, 0, 1, 1, &g) == ELB_ERR_DOMAIN);
  REQUIRE(elb_grid_make(8, 8, 0, 0, 1, 1, &g) == ELB_OK);
  elb_field* f = nullptr;
  REQUIRE(elb_field_create(&g, &f) == ELB_OK);
  double *ux, *uy;
  size_t nux, nuy;
  REQUIRE(elb_field_data(f, &ux, &nux, &uy, &nuy) == ELB_OK);
  CHECK(nux == 9u * 8u);
  CHECK(nuy == 8u * 9u);
  for (size_t k = 0; k < nux; ++k) ux[k] = 1.0;
  elb_energy_terms t;
  REQUIRE(elb_energy(f, 0.8, 0.1, 0.0, &t) == ELB_OK);
  CHECK(t.concave == doctest::Approx(std::pow(0.1, -0.2)));
  CHECK(t.dirichlet == doctest::Approx(0).scale(1));

  const fs::path p = fs::temp_directory_path() / "elbranch_capi_field.btf";
  REQUIRE(elb_field_write_btf(f, p.c_str()) == ELB_OK);
  elb_field* r = nullptr;
  REQUIRE(elb_field_read_btf(p.c_str(), &r) == ELB_OK);
  double *rx, *ry;
  size_t rnx, rny;
  REQUIRE(elb_field_data(r, &rx, &rnx, &ry, &rny) == ELB_OK);
  CHECK(std::memcmp(rx, ux, nux * sizeof(double)) == 0);
  elb_field_free(r);
  elb_field_free(f);
  fs::remove(p);
  CHECK(elb_field_read_btf("/nonexistent/x.btf", &r) == ELB_ERR_IO);
}

TEST_CASE("psi gradient through the C interface") {
  elb_grid g;
  REQUIRE(elb_grid_make(16, 16, 0, 0, 1, 1, &g) == ELB_OK);
  std::vector<double> psi(17 * 17), out(17 * 17);
  for (size_t k = 0; k < psi.size(); ++k) psi[k] = 0.01 * std::sin(0.37 * k);
  REQUIRE(elb_energy_gradient_psi(&g, psi.data(), nullptr, 0.8, 0.05, 0.05, out.data()) == ELB_OK);
  CHECK(elb_energy_gradient_psi(&g, psi.data(), nullptr, 0.8, 0.05, 0.0, out.data()) ==
        ELB_ERR_PRECONDITION);
}

TEST_CASE("measures and W1") {
  elb_measure *mu, *nu;
  REQUIRE(elb_measure_create(&mu) == ELB_OK);
  REQUIRE(elb_measure_create(&nu) == ELB_OK);
  elb_measure_add_atom(mu, 0, 0, 0.5);
  elb_measure_add_atom(mu, 1, 0, 0.5);
  elb_measure_add_atom(nu, 0.5, 0, 1.0);
  double d = 0;
  REQUIRE(elb_w1(mu, nu, &d) == ELB_OK);
  CHECK(d == doctest::Approx(0.5));
  elb_measure_add_atom(nu, 0.5, 0.5, 1.0);
  CHECK(elb_w1(mu, nu, &d) == ELB_ERR_COMPATIBILITY);
  size_t n = 0;
  elb_measure_size(nu, &n);
  CHECK(n == 2u);
  double x, y, m;
  CHECK(elb_measure_atom(nu, 5, &x, &y, &m) == ELB_ERR_DIMENSION);
  elb_measure_free(mu);
  elb_measure_free(nu);
}

TEST_CASE("dyadic functional") {
  elb_measure1d* m;
  REQUIRE(elb_measure1d_create(&m) == ELB_OK);
  elb_measure1d_add_atom(m, 0.3, 1.0);
  double v = 0, levels[6];
  REQUIRE(elb_galpha(m, 0.8, 5, &v, levels) == ELB_OK);
  CHECK(v == doctest::Approx(1));
  CHECK(levels[5] == doctest::Approx(1));
  elb_measure1d_free(m);
}

TEST_CASE("profile and synthesis") {
  elb_profile* p;
  REQUIRE(elb_profile_solve(0.8, 1.0, 0.01, 0, &p) == ELB_OK);
  elb_profile_info info;
  REQUIRE(elb_profile_get_info(p, &info) == ELB_OK);
  CHECK(info.mass_integral == doctest::Approx(0.5));
  double z = 0;
  REQUIRE(elb_profile_intensity(p, 0.0, &z) == ELB_OK);
  CHECK(z == doctest::Approx(info.amplitude));
  elb_profile_free(p);

  elb_graph* g;
  REQUIRE(elb_graph_create(&g) == ELB_OK);
  REQUIRE(elb_graph_add_edge(g, 0.2, 0.5, 0.8, 0.5, 1.0) == ELB_OK);
  CHECK(elb_graph_add_edge(g, 0.2, 0.5, 0.2, 0.5, 1.0) == ELB_ERR_DOMAIN);
  double ge = 0;
  elb_graph_energy(g, 0.8, &ge);
  CHECK(ge == doctest::Approx(0.6));
  elb_grid grid;
  elb_grid_make(256, 256, 0, 0, 1, 1, &grid);
  elb_synthesis* s;
  REQUIRE(elb_synthesize(g, 0.8, 0.01, &grid, 1, 0, &s) == ELB_OK);
  const elb_field* u;
  REQUIRE(elb_synthesis_field(s, &u) == ELB_OK);
  double mass = 0;
  elb_field_mass(u, &mass);
  CHECK(mass == doctest::Approx(0.6).epsilon(0.02));
  size_t nodes = 9;
  elb_synthesis_node_count(s, &nodes);
  CHECK(nodes == 0u);
  elb_synthesis_free(s);
  elb_grid_make(32, 32, 0, 0, 1, 1, &grid);
  CHECK(elb_synthesize(g, 0.8, 0.01, &grid, 1, 0, &s) == ELB_ERR_RESOLUTION);
  elb_graph_free(g);
}

namespace {
int g_calls = 0;
void count_calls(const elb_trace_entry*, void* user) {
  ++g_calls;
  *static_cast<int*>(user) += 1;
}
}  // namespace

TEST_CASE("solve through the C interface") {
  elb_config* c;
  REQUIRE(elb_config_create(&c) == ELB_OK);
  REQUIRE(elb_config_set(c, "nx", "32") == ELB_OK);
  REQUIRE(elb_config_set(c, "ny", "32") == ELB_OK);
  REQUIRE(elb_config_set(c, "eps_schedule", "0.1, 0.08") == ELB_OK);
  REQUIRE(elb_config_set(c, "steps_per_stage", "5") == ELB_OK);
  CHECK(elb_config_set(c, "nope", "1") == ELB_ERR_FORMAT);
  CHECK(std::string(elb_config_text(c)).find("nx = 32") != std::string::npos);
  elb_measure *fp, *fm;
  elb_measure_create(&fp);
  elb_measure_create(&fm);
  elb_measure_add_atom(fp, 0.3, 0.5, 1.0);
  elb_measure_add_atom(fm, 0.7, 0.5, 1.0);
  int user = 0;
  elb_result* r;
  REQUIRE(elb_solve(c, fp, fm, count_calls, &user, &r) == ELB_OK);
  size_t n = 0;
  elb_result_trace_count(r, &n);
  CHECK(static_cast<size_t>(user) == n);
  CHECK(g_calls == user);
  elb_solve_summary sum;
  REQUIRE(elb_result_summary(r, &sum) == ELB_OK);
  CHECK(sum.div_residual < 1e-8);
  CHECK(sum.total > 0);
  CHECK(std::string(elb_result_report(r)).find("energy") != std::string::npos);
  elb_stage_summary st;
  CHECK(elb_result_stage(r, 0, &st) == ELB_OK);
  CHECK(st.eps == doctest::Approx(0.1));
  elb_result_free(r);
  elb_measure_free(fp);
  elb_measure_free(fm);
  elb_config_free(c);
}
