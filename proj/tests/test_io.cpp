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
#include <cstring>
#include <filesystem>
#include <random>

#include "elbranch/error.hpp"
#include "elbranch/io.hpp"
#include "json.hpp"

using namespace elbranch;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("elbranch_io_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const char* name) const { return (path / name).string(); }
};

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::ok;
}

}  // namespace

TEST_CASE("BTF1 round trip is bit-identical") {
  TempDir dir;
  const GridSpec g = make_grid(7, 5, -0.3, 0.1, 1.1, 0.9);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  VectorField2D u(g);
  for (double& v : u.ux_values()) v = n(rng);
  for (double& v : u.uy_values()) v = n(rng);
  u.ux(0, 0) = -0.0;
  u.uy(1, 1) = 1e-310;  // subnormal
  write_btf(dir / "u.btf", u);
  const VectorField2D r = read_btf_vector(dir / "u.btf");
  CHECK(r.spec() == g);
  CHECK(std::memcmp(r.ux_values().data(), u.ux_values().data(), 8 * u.ux_values().size()) == 0);
  CHECK(std::memcmp(r.uy_values().data(), u.uy_values().data(), 8 * u.uy_values().size()) == 0);

  ScalarField2D s(g, Location::nodes);
  for (double& v : s.values()) v = n(rng);
  write_btf(dir / "s.btf", s);
  const BtfData d = read_btf(dir / "s.btf");
  CHECK(d.kind == BtfKind::nodal);
  CHECK(d.scalar.values() == s.values());
  CHECK(read_file(dir / "s.btf").rfind("BTF1 nodal 7 5 ", 0) == 0);
}

TEST_CASE("BTF1 format errors") {
  TempDir dir;
  write_file(dir / "a.btf", "BTF1 vector 4 4 0.25 0.25 0 0\nshort");
  CHECK(code_of([&] { read_btf(dir / "a.btf"); }) == ErrorCode::format);
  write_file(dir / "b.btf", "XYZ1 vector 4 4 0.25 0.25 0 0\n");
  CHECK(code_of([&] { read_btf(dir / "b.btf"); }) == ErrorCode::format);
  CHECK(code_of([&] { read_btf(dir / "missing.btf"); }) == ErrorCode::io);
  ScalarField2D s(make_grid(4, 4, 0, 0, 1, 1));
  write_btf(dir / "c.btf", s);
  CHECK(code_of([&] { read_btf_vector(dir / "c.btf"); }) == ErrorCode::format);
}

TEST_CASE("graph and measure text round trip") {
  TempDir dir;
  WeightedGraph g{{{{0.1, 0.2}, {0.3, 0.4}, 0.5}, {{1.0 / 3, 2.0 / 3}, {0.7, 0.9}, 1e-7}}};
  write_graph(dir / "g.txt", g);
  const WeightedGraph r = read_graph(dir / "g.txt");
  REQUIRE(r.edges.size() == 2);
  CHECK(r.edges[1].p0.x == g.edges[1].p0.x);
  CHECK(r.edges[1].w == g.edges[1].w);
  AtomicMeasure m{{{{1.0 / 7, -2.5}, 0.125}, {{0.9, 0.1}, 1.0 / 3}}};
  write_measure(dir / "m.txt", m);
  const AtomicMeasure mr = read_measure(dir / "m.txt");
  REQUIRE(mr.atoms.size() == 2);
  CHECK(mr.atoms[0].p.x == m.atoms[0].p.x);
  CHECK(mr.atoms[1].mass == m.atoms[1].mass);
}

TEST_CASE("text parsing: comments, blank lines and errors with line numbers") {
  const WeightedGraph g = parse_graph("# header\n\n0 0 1 0 1  # trailing\n  1 0 1 1 0.5\n");
  CHECK(g.edges.size() == 2);
  try {
    parse_graph("0 0 1 0 1\n0 0 1 1\n");
    FAIL("expected a format error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::format);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK(code_of([] { parse_graph("0 0 1 0 -1\n"); }) == ErrorCode::format);
  CHECK(code_of([] { parse_measure("0 0 nan\n"); }) == ErrorCode::format);
  CHECK(code_of([] { parse_measure("0 0\n"); }) == ErrorCode::format);
  const Measure1D m = parse_measure1d("atom 0.25 0.5\ndensity 1 2 3\n# x\natom 0.75 -1\n");
  CHECK(m.atoms.size() == 2);
  CHECK(m.density.size() == 3);
  CHECK(code_of([] { parse_measure1d("dot 0.1 1\n"); }) == ErrorCode::format);
}

TEST_CASE("config parsing and canonical text") {
  const ConfigMap m = parse_config(
      "# run\nalpha = 0.75\nnx = 64\nny = 32\nx1 = 2\neps0 = 0.08\neps_final = 0.01\n"
      "n_stages = 4\ndirection = majorize\nmass_bound_K = 3\nseed = 9\n");
  SolverConfig c;
  c.grid = make_grid(16, 16, 0, 0, 1, 1);
  apply_config(m, c);
  CHECK(c.alpha == 0.75);
  CHECK(c.grid.nx == 64);
  CHECK(c.grid.x_max() == doctest::Approx(2));
  CHECK(c.eps_schedule.size() == 4);
  CHECK(c.eps_schedule.back() == 0.01);
  CHECK(c.direction == DirectionKind::majorize);
  CHECK(*c.mass_bound_K == 3);
  CHECK(c.seed == 9u);
  // Canonical text reproduces the config.
  SolverConfig d;
  apply_config(parse_config(config_to_text(c)), d);
  CHECK(config_to_text(d) == config_to_text(c));
  CHECK(d.eps_schedule == c.eps_schedule);

  CHECK(code_of([] { parse_config("alpha 0.8\n"); }) == ErrorCode::format);
  SolverConfig e;
  CHECK(code_of([&] { apply_config({{"bogus", "1"}}, e); }) == ErrorCode::format);
  CHECK(code_of([&] { apply_config({{"alpha", "x"}}, e); }) == ErrorCode::format);
  CHECK(code_of([&] { apply_config({{"eps0", "0.1"}}, e); }) == ErrorCode::format);
}

TEST_CASE("FNV-1a reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
  CHECK(hex_digest(0xabcULL) == "0000000000000abc");
}

TEST_CASE("manifest lists digests that recompute identically") {
  TempDir dir;
  write_file(dir / "out.txt", "hello");
  write_file(dir / "in.txt", "input");
  RunManifest m;
  m.command = "test";
  m.config = "alpha = 0.8\n";
  m.inputs.emplace_back(dir / "in.txt", file_digest(dir / "in.txt"));
  write_manifest(dir.path.string(), m, {"out.txt"});
  const auto j = nlohmann::json::parse(read_file(dir / "manifest.json"));
  CHECK(j["version"] == kVersion);
  CHECK(j["outputs"][0]["file"] == "out.txt");
  CHECK(j["outputs"][0]["fnv1a64"] == hex_digest(fnv1a64("hello")));
  CHECK(j["inputs"][0]["fnv1a64"] == hex_digest(fnv1a64("input")));
}

TEST_CASE("CSV and PGM outputs") {
  TempDir dir;
  const GridSpec g = make_grid(4, 4, 0, 0, 1, 1);
  ScalarField2D s(g);
  s(1, 2) = 1.0 / 3;
  write_csv(dir / "s.csv", s);
  const std::string csv = read_file(dir / "s.csv");
  CHECK(csv.rfind("x,y,value\n", 0) == 0);
  CHECK(csv.find("0.33333333333333331") != std::string::npos);
  write_pgm(dir / "s.pgm", s);
  const std::string pgm = read_file(dir / "s.pgm");
  CHECK(pgm.rfind("P5\n4 4\n65535\n", 0) == 0);
  CHECK(pgm.size() == std::string("P5\n4 4\n65535\n").size() + 32);
  CHECK(read_file(dir / "s.pgm.txt").find("max = 0.33333333333333331") != std::string::npos);
  CHECK(format_double(0.1) == "0.10000000000000001");
}
