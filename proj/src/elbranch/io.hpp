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
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "elbranch/diagnostics.hpp"
#include "elbranch/grid.hpp"
#include "elbranch/measures.hpp"
#include "elbranch/profile.hpp"
#include "elbranch/solver.hpp"

namespace elbranch {

inline constexpr const char* kVersion = "0.1.0";

/// Shortest text that reads back to the same double (17 significant digits).
std::string format_double(double v);

// BTF1: one ASCII header line "BTF1 <scalar|vector|nodal> nx ny hx hy ox oy"
// followed by little-endian float64 values, row-major with y outer; vector
// payloads store the ux block then the uy block.
enum class BtfKind { scalar, vector, nodal };
struct BtfData {
  BtfKind kind = BtfKind::scalar;
  ScalarField2D scalar;  // scalar and nodal
  VectorField2D vector;
};
void write_btf(const std::string& path, const ScalarField2D& f);
void write_btf(const std::string& path, const VectorField2D& u);
BtfData read_btf(const std::string& path);
VectorField2D read_btf_vector(const std::string& path);

// Text inputs. '#' starts a comment; blank lines are skipped.
WeightedGraph parse_graph(std::string_view text);
WeightedGraph read_graph(const std::string& path);
void write_graph(const std::string& path, const WeightedGraph& g);
AtomicMeasure parse_measure(std::string_view text);
AtomicMeasure read_measure(const std::string& path);
void write_measure(const std::string& path, const AtomicMeasure& m);

/// 1-D measure on [0, 1): lines "atom x mass" or "density v0 v1 ...".
Measure1D parse_measure1d(std::string_view text);
Measure1D read_measure1d(const std::string& path);

/// Flat "key = value" configuration, keys in file order.
using ConfigMap = std::vector<std::pair<std::string, std::string>>;
ConfigMap parse_config(std::string_view text);
ConfigMap read_config(const std::string& path);
/// Applies keys to cfg; unknown keys or bad values throw ErrorCode::format.
/// Grid keys: nx, ny, x0, y0, x1, y1. Schedules: eps_schedule / delta_schedule
/// as comma lists, or eps0, eps_final, n_stages.
void apply_config(const ConfigMap& m, SolverConfig& cfg);
std::string config_to_text(const SolverConfig& cfg);

// CSV at 17 significant digits.
void write_csv(const std::string& path, const ScalarField2D& f);  // x,y,value
void write_csv(const std::string& path, const VectorField2D& u);  // x,y,ux,uy,norm
void write_trace_csv(const std::string& path, const std::vector<TraceEntry>& trace);
void write_profile_csv(const std::string& path, const TransverseProfile& p);

/// 16-bit binary PGM with linear min-max scaling; the range goes to
/// path + ".txt".
void write_pgm(const std::string& path, const ScalarField2D& f);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t file_digest(const std::string& path);
std::string hex_digest(std::uint64_t d);

struct RunManifest {
  std::string command;
  std::string config;
  std::vector<std::pair<std::string, std::uint64_t>> inputs;
  std::vector<std::pair<std::string, std::uint64_t>> outputs;  // names relative to the run dir
  double wall_clock_seconds = 0;
};
/// Writes dir/manifest.json, digesting the listed output files.
void write_manifest(const std::string& dir, RunManifest m,
                    const std::vector<std::string>& output_files);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view bytes);

}  // namespace elbranch
