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

#include "elbranch/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "json.hpp"

#include "elbranch/error.hpp"

namespace elbranch {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io, "cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::io, "write failed: " + path);
}

namespace {

void put_le(std::string& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int k = 0; k < 8; ++k) out.push_back(static_cast<char>((bits >> (8 * k)) & 0xff));
}

double get_le(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(p[k]) << (8 * k);
  return std::bit_cast<double>(bits);
}

std::string btf_header(const char* kind, const GridSpec& g) {
  return std::string("BTF1 ") + kind + " " + std::to_string(g.nx) + " " + std::to_string(g.ny) +
         " " + format_double(g.hx) + " " + format_double(g.hy) + " " +
         format_double(g.origin.x) + " " + format_double(g.origin.y) + "\n";
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_number(std::string_view s, double& v) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

bool parse_int(std::string_view s, long& v) {
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

// Calls f(line_number, fields) for every non-empty line after comment removal.
template <class F>
void for_each_record(std::string_view text, F&& f) {
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    if (auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
    const auto fields = split_ws(line);
    if (!fields.empty()) f(line_no, fields);
    if (end == text.size()) break;
    pos = end + 1;
  }
}

[[noreturn]] void format_error(int line, const std::string& what) {
  fail(ErrorCode::format, "line " + std::to_string(line) + ": " + what);
}

std::vector<double> numbers(int line, const std::vector<std::string_view>& fields,
                            std::size_t expected, const char* what) {
  if (fields.size() != expected)
    format_error(line, std::string("expected ") + std::to_string(expected) + " fields (" + what +
                           "), got " + std::to_string(fields.size()));
  std::vector<double> v(expected);
  for (std::size_t k = 0; k < expected; ++k)
    if (!parse_number(fields[k], v[k]) || !std::isfinite(v[k]))
      format_error(line, "not a finite number: '" + std::string(fields[k]) + "'");
  return v;
}

}  // namespace

void write_btf(const std::string& path, const ScalarField2D& f) {
  std::string out = btf_header(f.location() == Location::cells ? "scalar" : "nodal", f.spec());
  out.reserve(out.size() + 8 * f.size());
  for (double v : f.values()) put_le(out, v);
  write_file(path, out);
}

void write_btf(const std::string& path, const VectorField2D& u) {
  std::string out = btf_header("vector", u.spec());
  out.reserve(out.size() + 8 * (u.ux_values().size() + u.uy_values().size()));
  for (double v : u.ux_values()) put_le(out, v);
  for (double v : u.uy_values()) put_le(out, v);
  write_file(path, out);
}

BtfData read_btf(const std::string& path) {
  const std::string bytes = read_file(path);
  const std::size_t nl = bytes.find('\n');
  if (nl == std::string::npos) fail(ErrorCode::format, path + ": missing BTF1 header line");
  const auto h = split_ws(std::string_view(bytes).substr(0, nl));
  if (h.size() != 8 || h[0] != "BTF1") fail(ErrorCode::format, path + ": malformed BTF1 header");
  BtfData d;
  if (h[1] == "scalar") d.kind = BtfKind::scalar;
  else if (h[1] == "vector") d.kind = BtfKind::vector;
  else if (h[1] == "nodal") d.kind = BtfKind::nodal;
  else fail(ErrorCode::format, path + ": unknown BTF1 kind '" + std::string(h[1]) + "'");
  long nx = 0, ny = 0;
  GridSpec g;
  if (!parse_int(h[2], nx) || !parse_int(h[3], ny) || !parse_number(h[4], g.hx) ||
      !parse_number(h[5], g.hy) || !parse_number(h[6], g.origin.x) ||
      !parse_number(h[7], g.origin.y))
    fail(ErrorCode::format, path + ": malformed BTF1 header numbers");
  if (nx < 4 || ny < 4 || nx > 1 << 16 || ny > 1 << 16 || !(g.hx > 0) || !(g.hy > 0))
    fail(ErrorCode::format, path + ": BTF1 grid out of range");
  g.nx = static_cast<int>(nx);
  g.ny = static_cast<int>(ny);
  std::size_t count;
  if (d.kind == BtfKind::scalar) count = static_cast<std::size_t>(nx) * ny;
  else if (d.kind == BtfKind::nodal) count = static_cast<std::size_t>(nx + 1) * (ny + 1);
  else count = static_cast<std::size_t>(nx + 1) * ny + static_cast<std::size_t>(nx) * (ny + 1);
  if (bytes.size() - nl - 1 != 8 * count)
    fail(ErrorCode::format, path + ": payload has " + std::to_string(bytes.size() - nl - 1) +
                                " bytes, expected " + std::to_string(8 * count));
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + nl + 1);
  if (d.kind == BtfKind::vector) {
    d.vector = VectorField2D(g);
    for (double& v : d.vector.ux_values()) v = get_le(p), p += 8;
    for (double& v : d.vector.uy_values()) v = get_le(p), p += 8;
  } else {
    d.scalar = ScalarField2D(g, d.kind == BtfKind::scalar ? Location::cells : Location::nodes);
    for (double& v : d.scalar.values()) v = get_le(p), p += 8;
  }
  return d;
}

VectorField2D read_btf_vector(const std::string& path) {
  BtfData d = read_btf(path);
  if (d.kind != BtfKind::vector) fail(ErrorCode::format, path + ": expected a vector field");
  return std::move(d.vector);
}

WeightedGraph parse_graph(std::string_view text) {
  WeightedGraph g;
  for_each_record(text, [&](int line, const auto& f) {
    const auto v = numbers(line, f, 5, "x0 y0 x1 y1 weight");
    if (!(v[4] > 0)) format_error(line, "edge weight must be positive");
    if (v[0] == v[2] && v[1] == v[3]) format_error(line, "zero-length edge");
    g.edges.push_back({{v[0], v[1]}, {v[2], v[3]}, v[4]});
  });
  return g;
}

WeightedGraph read_graph(const std::string& path) { return parse_graph(read_file(path)); }

void write_graph(const std::string& path, const WeightedGraph& g) {
  std::string out = "# x0 y0 x1 y1 weight\n";
  for (const Edge& e : g.edges)
    out += format_double(e.p0.x) + " " + format_double(e.p0.y) + " " + format_double(e.p1.x) +
           " " + format_double(e.p1.y) + " " + format_double(e.w) + "\n";
  write_file(path, out);
}

AtomicMeasure parse_measure(std::string_view text) {
  AtomicMeasure m;
  for_each_record(text, [&](int line, const auto& f) {
    const auto v = numbers(line, f, 3, "x y mass");
    m.atoms.push_back({{v[0], v[1]}, v[2]});
  });
  return m;
}

AtomicMeasure read_measure(const std::string& path) { return parse_measure(read_file(path)); }

void write_measure(const std::string& path, const AtomicMeasure& m) {
  std::string out = "# x y mass\n";
  for (const Atom& a : m.atoms)
    out += format_double(a.p.x) + " " + format_double(a.p.y) + " " + format_double(a.mass) + "\n";
  write_file(path, out);
}

Measure1D parse_measure1d(std::string_view text) {
  Measure1D m;
  for_each_record(text, [&](int line, const auto& f) {
    if (f[0] == "atom") {
      std::vector<std::string_view> rest(f.begin() + 1, f.end());
      const auto v = numbers(line, rest, 2, "atom x mass");
      m.atoms.push_back({v[0], v[1]});
    } else if (f[0] == "density") {
      std::vector<std::string_view> rest(f.begin() + 1, f.end());
      if (rest.empty()) format_error(line, "density needs at least one value");
      const auto v = numbers(line, rest, rest.size(), "density values");
      m.density.insert(m.density.end(), v.begin(), v.end());
    } else {
      format_error(line, "expected 'atom x mass' or 'density v...'");
    }
  });
  return m;
}

Measure1D read_measure1d(const std::string& path) { return parse_measure1d(read_file(path)); }

ConfigMap parse_config(std::string_view text) {
  ConfigMap m;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) format_error(line_no, "expected 'key = value'");
    std::string key = trim(std::string_view(t).substr(0, eq));
    std::string val = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) format_error(line_no, "empty key");
    m.emplace_back(std::move(key), std::move(val));
  }
  return m;
}

ConfigMap read_config(const std::string& path) { return parse_config(read_file(path)); }

namespace {

double cfg_double(const std::string& key, const std::string& v) {
  double d;
  if (!parse_number(v, d) || !std::isfinite(d))
    fail(ErrorCode::format, "config key '" + key + "': not a number: '" + v + "'");
  return d;
}

long cfg_int(const std::string& key, const std::string& v) {
  long d;
  if (!parse_int(v, d)) fail(ErrorCode::format, "config key '" + key + "': not an integer: '" + v + "'");
  return d;
}

bool cfg_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(ErrorCode::format, "config key '" + key + "': not a boolean: '" + v + "'");
}

std::vector<double> cfg_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ',')) {
    const std::string t = trim(item);
    if (!t.empty()) out.push_back(cfg_double(key, t));
  }
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + format_double(v[k]);
  return s;
}

}  // namespace

void apply_config(const ConfigMap& m, SolverConfig& cfg) {
  long nx = cfg.grid.nx, ny = cfg.grid.ny;
  double x0 = cfg.grid.origin.x, y0 = cfg.grid.origin.y;
  double x1 = cfg.grid.nx > 0 ? cfg.grid.x_max() : 1.0, y1 = cfg.grid.ny > 0 ? cfg.grid.y_max() : 1.0;
  bool grid_touched = false;
  double eps0 = 0, eps_final = 0;
  long n_stages = 0;
  for (const auto& [k, v] : m) {
    if (k == "alpha") cfg.alpha = cfg_double(k, v);
    else if (k == "nx") nx = cfg_int(k, v), grid_touched = true;
    else if (k == "ny") ny = cfg_int(k, v), grid_touched = true;
    else if (k == "x0") x0 = cfg_double(k, v), grid_touched = true;
    else if (k == "y0") y0 = cfg_double(k, v), grid_touched = true;
    else if (k == "x1") x1 = cfg_double(k, v), grid_touched = true;
    else if (k == "y1") y1 = cfg_double(k, v), grid_touched = true;
    else if (k == "eps_schedule") cfg.eps_schedule = cfg_list(k, v);
    else if (k == "delta_schedule") cfg.delta_schedule = cfg_list(k, v);
    else if (k == "eps0") eps0 = cfg_double(k, v);
    else if (k == "eps_final") eps_final = cfg_double(k, v);
    else if (k == "n_stages") n_stages = cfg_int(k, v);
    else if (k == "steps_per_stage") cfg.steps_per_stage = static_cast<int>(cfg_int(k, v));
    else if (k == "step_size") cfg.step_size = cfg_double(k, v);
    else if (k == "backtrack") cfg.backtrack = cfg_double(k, v);
    else if (k == "max_backtracks") cfg.max_backtracks = static_cast<int>(cfg_int(k, v));
    else if (k == "armijo") cfg.armijo = cfg_double(k, v);
    else if (k == "momentum") cfg.momentum = cfg_double(k, v);
    else if (k == "precondition") cfg.precondition = cfg_bool(k, v);
    else if (k == "direction") {
      if (v == "gradient") cfg.direction = DirectionKind::gradient;
      else if (v == "lbfgs") cfg.direction = DirectionKind::lbfgs;
      else if (v == "majorize") cfg.direction = DirectionKind::majorize;
      else fail(ErrorCode::format, "config key 'direction': expected gradient, lbfgs or majorize");
    } else if (k == "lbfgs_memory") cfg.lbfgs_memory = static_cast<int>(cfg_int(k, v));
    else if (k == "majorize_cg_iters") cfg.majorize_cg_iters = static_cast<int>(cfg_int(k, v));
    else if (k == "majorize_cg_tol") cfg.majorize_cg_tol = cfg_double(k, v);
    else if (k == "mode") {
      if (v == "exact") cfg.mode = ConstraintMode::exact;
      else if (v == "quadratic") cfg.mode = ConstraintMode::quadratic;
      else if (v == "w1") cfg.mode = ConstraintMode::w1;
      else fail(ErrorCode::format, "config key 'mode': expected exact, quadratic or w1");
    } else if (k == "lambda") cfg.lambda = cfg_double(k, v);
    else if (k == "w1_C") cfg.w1_C = cfg_double(k, v);
    else if (k == "w1_block") cfg.w1_block = static_cast<int>(cfg_int(k, v));
    else if (k == "mass_bound_K") {
      if (v == "none") cfg.mass_bound_K.reset();
      else cfg.mass_bound_K = cfg_double(k, v);
    } else if (k == "mass_guard_step") cfg.mass_guard_step = cfg_bool(k, v);
    else if (k == "init") {
      if (v == "zero") cfg.init = InitKind::zero;
      else if (v == "random") cfg.init = InitKind::random;
      else if (v == "warm_start") cfg.init = InitKind::warm_start;
      else fail(ErrorCode::format, "config key 'init': expected zero, random or warm_start");
    } else if (k == "warm_start") cfg.warm_start = read_btf_vector(v);
    else if (k == "seed") cfg.seed = static_cast<std::uint64_t>(cfg_int(k, v));
    else if (k == "init_amplitude") cfg.init_amplitude = cfg_double(k, v);
    else if (k == "tol_grad") cfg.tol_grad = cfg_double(k, v);
    else if (k == "restarts") cfg.restarts = static_cast<int>(cfg_int(k, v));
    else if (k == "parallel_restarts") cfg.parallel_restarts = cfg_bool(k, v);
    else if (k == "sigma_factor") cfg.sigma_factor = cfg_double(k, v);
    else if (k == "sigma") {
      if (v == "auto") cfg.sigma_override.reset();
      else cfg.sigma_override = cfg_double(k, v);
    } else fail(ErrorCode::format, "unknown config key '" + k + "'");
  }
  if (grid_touched) {
    if (nx < 4 || ny < 4 || nx > 1 << 14 || ny > 1 << 14)
      fail(ErrorCode::format, "config grid size out of range");
    cfg.grid = make_grid(static_cast<int>(nx), static_cast<int>(ny), x0, y0, x1, y1);
  }
  if (n_stages > 0 || eps0 > 0 || eps_final > 0) {
    if (!(n_stages >= 2 && eps0 > eps_final && eps_final > 0))
      fail(ErrorCode::format, "eps0, eps_final and n_stages must be given together");
    cfg.eps_schedule = continuation_schedule(eps0, eps_final, static_cast<int>(n_stages));
  }
}

std::string config_to_text(const SolverConfig& c) {
  std::ostringstream os;
  auto kv = [&](const char* k, const std::string& v) { os << k << " = " << v << "\n"; };
  auto d = [](double v) { return format_double(v); };
  kv("alpha", d(c.alpha));
  kv("nx", std::to_string(c.grid.nx));
  kv("ny", std::to_string(c.grid.ny));
  kv("x0", d(c.grid.origin.x));
  kv("y0", d(c.grid.origin.y));
  kv("x1", d(c.grid.x_max()));
  kv("y1", d(c.grid.y_max()));
  kv("eps_schedule", join(c.eps_schedule));
  if (!c.delta_schedule.empty()) kv("delta_schedule", join(c.delta_schedule));
  kv("steps_per_stage", std::to_string(c.steps_per_stage));
  kv("step_size", d(c.step_size));
  kv("backtrack", d(c.backtrack));
  kv("max_backtracks", std::to_string(c.max_backtracks));
  kv("armijo", d(c.armijo));
  kv("momentum", d(c.momentum));
  kv("precondition", c.precondition ? "true" : "false");
  kv("direction", c.direction == DirectionKind::gradient ? "gradient"
                  : c.direction == DirectionKind::lbfgs  ? "lbfgs"
                                                         : "majorize");
  kv("lbfgs_memory", std::to_string(c.lbfgs_memory));
  kv("majorize_cg_iters", std::to_string(c.majorize_cg_iters));
  kv("majorize_cg_tol", d(c.majorize_cg_tol));
  kv("mode", c.mode == ConstraintMode::exact ? "exact"
             : c.mode == ConstraintMode::quadratic ? "quadratic"
                                                   : "w1");
  kv("lambda", d(c.lambda));
  kv("w1_C", d(c.w1_C));
  kv("w1_block", std::to_string(c.w1_block));
  kv("mass_bound_K", c.mass_bound_K ? d(*c.mass_bound_K) : "none");
  kv("mass_guard_step", c.mass_guard_step ? "true" : "false");
  kv("init", c.init == InitKind::zero ? "zero" : c.init == InitKind::random ? "random" : "warm_start");
  kv("seed", std::to_string(c.seed));
  kv("init_amplitude", d(c.init_amplitude));
  kv("tol_grad", d(c.tol_grad));
  kv("restarts", std::to_string(c.restarts));
  kv("parallel_restarts", c.parallel_restarts ? "true" : "false");
  kv("sigma_factor", d(c.sigma_factor));
  kv("sigma", c.sigma_override ? d(*c.sigma_override) : "auto");
  return os.str();
}

void write_csv(const std::string& path, const ScalarField2D& f) {
  std::string out = "x,y,value\n";
  const GridSpec& g = f.spec();
  for (int j = 0; j < f.height(); ++j)
    for (int i = 0; i < f.width(); ++i) {
      const Point p = f.location() == Location::cells ? g.cell_center(i, j) : g.node(i, j);
      out += format_double(p.x) + "," + format_double(p.y) + "," + format_double(f(i, j)) + "\n";
    }
  write_file(path, out);
}

void write_csv(const std::string& path, const VectorField2D& u) {
  std::string out = "x,y,ux,uy,norm\n";
  const GridSpec& g = u.spec();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const Point p = g.cell_center(i, j);
      const Point v = u.cell_value(i, j);
      out += format_double(p.x) + "," + format_double(p.y) + "," + format_double(v.x) + "," +
             format_double(v.y) + "," + format_double(std::hypot(v.x, v.y)) + "\n";
    }
  write_file(path, out);
}

void write_trace_csv(const std::string& path, const std::vector<TraceEntry>& trace) {
  std::string out = "iter,eps,delta,concave,dirichlet,total,div_residual,mass,restart,stage,objective,step,grad_norm\n";
  for (const TraceEntry& t : trace)
    out += std::to_string(t.iteration) + "," + format_double(t.eps) + "," + format_double(t.delta) +
           "," + format_double(t.concave) + "," + format_double(t.dirichlet) + "," +
           format_double(t.energy) + "," + format_double(t.div_residual) + "," +
           format_double(t.mass) + "," + std::to_string(t.restart) + "," +
           std::to_string(t.stage) + "," + format_double(t.objective) + "," +
           format_double(t.step) + "," + format_double(t.grad_norm) + "\n";
  write_file(path, out);
}

void write_profile_csv(const std::string& path, const TransverseProfile& p) {
  std::string out = "# alpha=" + format_double(p.alpha) + " theta=" + format_double(p.theta) +
                    " eps=" + format_double(p.eps) + " amplitude=" + format_double(p.amplitude) +
                    " kappa=" + format_double(p.kappa) + " plateau_halfwidth=" +
                    format_double(p.plateau_halfwidth) + " T=" + format_double(p.T) +
                    " support_halfwidth=" + format_double(p.support_halfwidth) + "\n";
  out += "t,z,s,intensity\n";
  for (std::size_t k = 0; k < p.t_table.size(); ++k) {
    const double t = p.plateau_halfwidth + p.t_table[k];
    const double s = t / p.amplitude;
    out += format_double(t) + "," + format_double(p.z_table[k]) + "," + format_double(s) + "," +
           format_double(p.amplitude * p.z_table[k]) + "\n";
  }
  write_file(path, out);
}

void write_pgm(const std::string& path, const ScalarField2D& f) {
  const auto& v = f.values();
  require(!v.empty(), ErrorCode::precondition, "empty field");
  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  const double lo = *lo_it, hi = *hi_it;
  const int w = f.width(), h = f.height();
  std::string out = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n65535\n";
  // Top row of the image is the largest y.
  for (int j = h - 1; j >= 0; --j)
    for (int i = 0; i < w; ++i) {
      const double s = hi > lo ? (f(i, j) - lo) / (hi - lo) : 0.0;
      const auto q = static_cast<unsigned>(std::lround(std::clamp(s, 0.0, 1.0) * 65535.0));
      out.push_back(static_cast<char>(q >> 8));
      out.push_back(static_cast<char>(q & 0xff));
    }
  write_file(path, out);
  write_file(path + ".txt", "min = " + format_double(lo) + "\nmax = " + format_double(hi) +
                                "\nscaling = linear\n");
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t file_digest(const std::string& path) { return fnv1a64(read_file(path)); }

std::string hex_digest(std::uint64_t d) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(d));
  return buf;
}

void write_manifest(const std::string& dir, RunManifest m,
                    const std::vector<std::string>& output_files) {
  namespace fs = std::filesystem;
  for (const std::string& f : output_files)
    m.outputs.push_back({f, file_digest((fs::path(dir) / f).string())});
  nlohmann::ordered_json j;
  j["tool"] = "elbranch";
  j["version"] = kVersion;
  j["command"] = m.command;
  j["config"] = m.config;
  j["wall_clock_seconds"] = m.wall_clock_seconds;
  auto list = [](const auto& v) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (const auto& [name, d] : v) a.push_back({{"file", name}, {"fnv1a64", hex_digest(d)}});
    return a;
  };
  j["inputs"] = list(m.inputs);
  j["outputs"] = list(m.outputs);
  write_file((fs::path(dir) / "manifest.json").string(), j.dump(2) + "\n");
}

}  // namespace elbranch
