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

#include "elbranch/solver.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "elbranch/constants.hpp"
#include "elbranch/error.hpp"
#include "elbranch/mincost_flow.hpp"
#include "elbranch/poisson.hpp"
#include "elbranch/preconditioner.hpp"
#include "elbranch/profile.hpp"

namespace elbranch {

void SolverConfig::validate() const {
  grid.validate();
  exponents(alpha);
  require(!eps_schedule.empty(), ErrorCode::domain, "eps schedule is empty");
  for (std::size_t k = 0; k < eps_schedule.size(); ++k) {
    require(eps_schedule[k] > 0, ErrorCode::domain, "eps values must be positive");
    if (k > 0)
      require(eps_schedule[k] < eps_schedule[k - 1], ErrorCode::domain,
              "eps schedule must be strictly decreasing");
  }
  require(delta_schedule.empty() || delta_schedule.size() == eps_schedule.size(),
          ErrorCode::domain, "delta schedule length differs from the eps schedule");
  for (double d : delta_schedule)
    require(d > 0 && d < 1, ErrorCode::domain, "delta values must lie in (0, 1)");
  require(steps_per_stage >= 0, ErrorCode::domain, "steps_per_stage must be >= 0");
  require(step_size > 0, ErrorCode::domain, "step size must be positive");
  require(backtrack > 0 && backtrack < 1, ErrorCode::domain, "backtracking factor in (0, 1)");
  require(armijo > 0 && armijo < 1, ErrorCode::domain, "Armijo constant in (0, 1)");
  require(momentum >= 0 && momentum < 1, ErrorCode::domain, "momentum in [0, 1)");
  require(lbfgs_memory >= 1, ErrorCode::domain, "lbfgs memory must be >= 1");
  require(direction != DirectionKind::majorize || mode == ConstraintMode::exact,
          ErrorCode::domain, "the majorize direction needs the exact constraint mode");
  require(majorize_cg_iters >= 1 && majorize_cg_tol > 0, ErrorCode::domain,
          "majorize CG settings must be positive");
  require(mode != ConstraintMode::quadratic || lambda > 0, ErrorCode::domain,
          "quadratic mode needs lambda > 0");
  require(mode != ConstraintMode::w1 || (w1_C > 0 && alpha > 0.5), ErrorCode::domain,
          "w1 mode needs C > 0");
  require(w1_block >= 1, ErrorCode::domain, "w1 block size must be >= 1");
  require(!mass_bound_K || *mass_bound_K > 0, ErrorCode::domain, "mass bound must be positive");
  require(restarts >= 1, ErrorCode::domain, "restarts must be >= 1");
  require(init != InitKind::warm_start || (warm_start && warm_start->spec() == grid),
          ErrorCode::domain, "warm start field missing or on another grid");
  require(sigma_factor > 0, ErrorCode::domain, "sigma factor must be positive");
}

MassGuard mass_guard(const VectorField2D& u, double K) {
  require(K > 0, ErrorCode::domain, "mass bound must be positive");
  MassGuard m;
  m.mass = field_mass(u);
  m.feasible = m.mass <= K;
  m.exceeded_by = m.feasible ? 0.0 : m.mass - K;
  return m;
}

std::vector<double> continuation_schedule(double eps0, double eps_final, int n_stages) {
  require(eps0 > eps_final && eps_final > 0, ErrorCode::domain,
          "continuation needs eps0 > eps_final > 0");
  require(n_stages >= 2, ErrorCode::domain, "continuation needs at least 2 stages");
  std::vector<double> out(n_stages);
  const double r = std::log(eps_final / eps0) / (n_stages - 1);
  for (int k = 0; k < n_stages; ++k) out[k] = eps0 * std::exp(r * k);
  out.back() = eps_final;
  return out;
}

std::vector<double> default_deltas(const std::vector<double>& eps, double alpha) {
  std::vector<double> out;
  for (double e : eps) out.push_back(std::min(0.1, std::pow(e, (alpha + 1) / 3)));
  return out;
}

namespace {

double max_atom_mass(const AtomicMeasure& a, const AtomicMeasure& b) {
  double m = 0;
  for (const Atom& x : a.atoms) m = std::max(m, std::abs(x.mass));
  for (const Atom& x : b.atoms) m = std::max(m, std::abs(x.mass));
  return m;
}

double clearance(const GridSpec& g, const AtomicMeasure& a) {
  double c = std::numeric_limits<double>::infinity();
  for (const Atom& x : a.atoms)
    c = std::min({c, x.p.x - g.origin.x, g.x_max() - x.p.x, x.p.y - g.origin.y, g.y_max() - x.p.y});
  return c;
}

}  // namespace

double stage_sigma(const SolverConfig& cfg, double eps, const AtomicMeasure& fplus,
                   const AtomicMeasure& fminus) {
  const double hmin = 2 * std::max(cfg.grid.hx, cfg.grid.hy);
  if (cfg.sigma_override) return std::max(*cfg.sigma_override, hmin);
  const double m = max_atom_mass(fplus, fminus);
  if (m == 0) return hmin;
  const double R = solve_profile(cfg.alpha, m, eps, 256).support_halfwidth;
  const double clear = std::min(clearance(cfg.grid, fplus), clearance(cfg.grid, fminus));
  return std::max(hmin, std::min(cfg.sigma_factor * R, clear / 3));
}

namespace {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) {
  double s = 0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

struct Eval {
  double objective = 0;
  double concave = 0;
  double dirichlet = 0;
};

// One stage of one constraint mode: x is the descent variable.
class Problem {
 public:
  virtual ~Problem() = default;
  virtual Eval value(const Vec& x) = 0;
  virtual Eval value_and_grad(const Vec& x, Vec& g) = 0;
  /// d = M^{-1} g (M the metric of the descent).
  virtual void metric_inverse(const Vec& g, Vec& d) { d = g; }
  virtual VectorField2D field(const Vec& x) const = 0;
  /// Approximate minimizer step of the quadratic majorant at x; returns
  /// false when unsupported.
  virtual bool majorize_step(const Vec&, const Vec&, Vec&) { return false; }
};

class ExactProblem : public Problem {
 public:
  ExactProblem(const ScalarField2D& phi, const EnergyParams& p, StreamPreconditioner* pre,
               int cg_iters = 60, double cg_tol = 1e-3)
      : grad_phi_(gradient(phi)), p_(p), pre_(pre), psi_(phi.spec(), Location::nodes),
        cg_iters_(cg_iters), cg_tol_(cg_tol) {}

  // Solve H d = -g by CG preconditioned with the DST metric, H the majorant
  // Hessian in psi. Every CG iterate started at zero is a descent direction.
  bool majorize_step(const Vec& x, const Vec& g, Vec& d) override {
    const GridSpec& s = grad_phi_.spec();
    const std::vector<double> w = majorant_weights(field(x), p_);
    if (pre_) {
      double lw = 0;
      for (double v : w) lw += std::log(v);
      const double wt = std::exp(lw / static_cast<double>(w.size()));
      pre_->set_coefficients(std::pow(p_.eps, p_.alpha + 1), std::pow(p_.eps, p_.alpha - 1) * wt);
    }
    ScalarField2D in(s, Location::nodes);
    VectorField2D hv;
    auto apply = [&](const Vec& v, Vec& out) {
      in.values() = v;
      majorant_apply(curl_apply(in), p_, w, hv);
      ScalarField2D r = curl_adjoint(hv);
      for (int i = 0; i <= s.nx; ++i) r(i, 0) = r(i, s.ny) = 0;
      for (int j = 0; j <= s.ny; ++j) r(0, j) = r(s.nx, j) = 0;
      out = std::move(r.values());
    };
    const std::size_t n = g.size();
    d.assign(n, 0.0);
    Vec r(n), z, pdir, ap;
    for (std::size_t k = 0; k < n; ++k) r[k] = -g[k];
    metric_inverse(r, z);
    pdir = z;
    double rz = dot(r, z);
    const double r0 = std::sqrt(dot(r, r));
    if (r0 == 0) return true;
    for (int it = 0; it < cg_iters_; ++it) {
      apply(pdir, ap);
      const double pap = dot(pdir, ap);
      if (!(pap > 0)) break;
      const double a = rz / pap;
      for (std::size_t k = 0; k < n; ++k) {
        d[k] += a * pdir[k];
        r[k] -= a * ap[k];
      }
      if (std::sqrt(dot(r, r)) <= cg_tol_ * r0) break;
      metric_inverse(r, z);
      const double rz_new = dot(r, z);
      const double b = rz_new / rz;
      rz = rz_new;
      for (std::size_t k = 0; k < n; ++k) pdir[k] = z[k] + b * pdir[k];
    }
    if (dot(d, d) == 0) {
      metric_inverse(g, d);
      for (double& v : d) v = -v;
    }
    return true;
  }

  VectorField2D field(const Vec& x) const override {
    ScalarField2D psi(grad_phi_.spec(), Location::nodes);
    psi.values() = x;
    VectorField2D u = curl_apply(psi);
    u += grad_phi_;
    return u;
  }
  Eval value(const Vec& x) override {
    Eval e;
    e.objective = energy_total(field(x), p_, &e.concave, &e.dirichlet);
    return e;
  }
  Eval value_and_grad(const Vec& x, Vec& g) override {
    Eval e = value(x);
    VectorField2D gf;
    energy_with_face_gradient(field(x), p_, gf);
    ScalarField2D gp = curl_adjoint(gf);
    const GridSpec& s = grad_phi_.spec();
    for (int i = 0; i <= s.nx; ++i) gp(i, 0) = gp(i, s.ny) = 0;
    for (int j = 0; j <= s.ny; ++j) gp(0, j) = gp(s.nx, j) = 0;
    g = std::move(gp.values());
    return e;
  }
  void metric_inverse(const Vec& g, Vec& d) override {
    if (!pre_) {
      d = g;
      return;
    }
    psi_.values() = g;
    ScalarField2D out;
    pre_->apply_inverse(psi_, out);
    d = std::move(out.values());
  }

 private:
  VectorField2D grad_phi_;
  EnergyParams p_;
  StreamPreconditioner* pre_;
  ScalarField2D psi_;
  int cg_iters_;
  double cg_tol_;
};

// Face-variable problems share packing of u into one vector.
class FaceProblem : public Problem {
 public:
  FaceProblem(const GridSpec& g, const EnergyParams& p) : grid_(g), p_(p) {}

  VectorField2D field(const Vec& x) const override {
    VectorField2D u(grid_);
    const std::size_t nx = u.ux_values().size();
    std::copy(x.begin(), x.begin() + nx, u.ux_values().begin());
    std::copy(x.begin() + nx, x.end(), u.uy_values().begin());
    return u;
  }
  static Vec pack(const VectorField2D& u) {
    Vec x(u.ux_values());
    x.insert(x.end(), u.uy_values().begin(), u.uy_values().end());
    return x;
  }
  Eval value(const Vec& x) override {
    const VectorField2D u = field(x);
    Eval e;
    e.objective = energy_total(u, p_, &e.concave, &e.dirichlet);
    e.objective += penalty(u, nullptr);
    return e;
  }
  Eval value_and_grad(const Vec& x, Vec& g) override {
    const VectorField2D u = field(x);
    Eval e;
    VectorField2D gf;
    energy_with_face_gradient(u, p_, gf);
    energy_total(u, p_, &e.concave, &e.dirichlet);
    ScalarField2D gdiv(grid_);
    e.objective = e.concave + e.dirichlet + penalty(u, &gdiv);
    // Chain rule through the divergence on interior faces.
    for (int j = 0; j < grid_.ny; ++j)
      for (int i = 1; i < grid_.nx; ++i) gf.ux(i, j) += (gdiv(i - 1, j) - gdiv(i, j)) / grid_.hx;
    for (int j = 1; j < grid_.ny; ++j)
      for (int i = 0; i < grid_.nx; ++i) gf.uy(i, j) += (gdiv(i, j - 1) - gdiv(i, j)) / grid_.hy;
    gf.zero_boundary();
    g = pack(gf);
    return e;
  }

 protected:
  /// Penalty value; when grad is set, its derivative with respect to each
  /// cell's divergence.
  virtual double penalty(const VectorField2D& u, ScalarField2D* grad) = 0;
  GridSpec grid_;
  EnergyParams p_;
};

class QuadraticProblem : public FaceProblem {
 public:
  QuadraticProblem(const GridSpec& g, const EnergyParams& p, const ScalarField2D& f, double lambda)
      : FaceProblem(g, p), f_(f), lambda_(lambda) {}

 protected:
  double penalty(const VectorField2D& u, ScalarField2D* grad) override {
    const ScalarField2D d = divergence(u);
    const double a = grid_.cell_area();
    double s = 0;
    for (std::size_t k = 0; k < d.size(); ++k) {
      const double r = d.values()[k] - f_.values()[k];
      s += r * r;
      if (grad) grad->values()[k] = 2 * lambda_ * a * r;
    }
    return lambda_ * a * s;
  }

 private:
  ScalarField2D f_;
  double lambda_;
};

class W1Problem : public FaceProblem {
 public:
  W1Problem(const GridSpec& g, const EnergyParams& p, const AtomicMeasure& fplus,
            const AtomicMeasure& fminus, double C, int block)
      : FaceProblem(g, p), fplus_(fplus), fminus_(fminus), C_(C), block_(block) {
    dump_cost_ = std::hypot(g.nx * g.hx, g.ny * g.hy);
  }

 protected:
  double penalty(const VectorField2D& u, ScalarField2D* grad) override {
    const ScalarField2D d = divergence(u);
    const int bx = (grid_.nx + block_ - 1) / block_, by = (grid_.ny + block_ - 1) / block_;
    std::vector<double> pos(static_cast<std::size_t>(bx) * by, 0.0), neg(pos.size(), 0.0);
    double dmax = d.max_abs();
    const double a = grid_.cell_area();
    for (int j = 0; j < grid_.ny; ++j)
      for (int i = 0; i < grid_.nx; ++i) {
        const double v = d(i, j);
        if (std::abs(v) <= 1e-12 * dmax) continue;
        const std::size_t b = static_cast<std::size_t>(j / block_) * bx + i / block_;
        (v > 0 ? pos[b] : neg[b]) += std::abs(v) * a;
      }
    std::vector<double> dpos(pos.size(), 0.0), dneg(pos.size(), 0.0);
    const double e = 2 * p_.alpha - 1;
    double total = 0;
    for (int side = 0; side < 2; ++side) {
      const std::vector<double>& m = side == 0 ? pos : neg;
      const AtomicMeasure& target = side == 0 ? fplus_ : fminus_;
      std::vector<double>& dm = side == 0 ? dpos : dneg;
      std::vector<double> pot;
      const double w = transport(m, target, bx, grad ? &pot : nullptr);
      total += w > 0 ? C_ * std::pow(w, e) : 0.0;
      if (grad) {
        const double scale = C_ * e * std::pow(std::max(w, 1e-12), e - 1);
        for (std::size_t k = 0; k < m.size(); ++k) dm[k] = scale * pot[k];
      }
    }
    if (grad) {
      for (int j = 0; j < grid_.ny; ++j)
        for (int i = 0; i < grid_.nx; ++i) {
          const double v = d(i, j);
          const std::size_t b = static_cast<std::size_t>(j / block_) * bx + i / block_;
          (*grad)(i, j) = v > 0 ? a * dpos[b] : (v < 0 ? -a * dneg[b] : 0.0);
        }
    }
    return total;
  }

 private:
  // W1 between block masses and target atoms; unequal totals are balanced by
  // a dump atom at distance dump_cost_ from everything. pot receives the
  // derivative of the cost with respect to every block mass.
  double transport(const std::vector<double>& m, const AtomicMeasure& target, int bx,
                   std::vector<double>* pot) {
    std::vector<int> idx;
    std::vector<double> supply;
    for (std::size_t k = 0; k < m.size(); ++k)
      if (m[k] > 0) {
        idx.push_back(static_cast<int>(k));
        supply.push_back(m[k]);
      }
    std::vector<double> demand;
    for (const Atom& t : target.atoms) demand.push_back(t.mass);
    double ts = 0, td = 0;
    for (double s : supply) ts += s;
    for (double s : demand) td += s;
    const bool dump_supply = td > ts, dump_demand = ts > td;
    if (dump_supply) supply.push_back(td - ts);
    if (dump_demand) demand.push_back(ts - td);
    const int ns = static_cast<int>(idx.size());
    const int nd = static_cast<int>(target.atoms.size());
    auto center = [&](int k) {
      const int b = idx[k];
      const int ib = b % bx, jb = b / bx;
      const double cx = grid_.origin.x + std::min((ib + 0.5) * block_, 0.5 * (ib * block_ + grid_.nx)) * grid_.hx;
      const double cy = grid_.origin.y + std::min((jb + 0.5) * block_, 0.5 * (jb * block_ + grid_.ny)) * grid_.hy;
      return Point{cx, cy};
    };
    std::vector<Point> centers(ns);
    for (int k = 0; k < ns; ++k) centers[k] = center(k);
    const TransportResult tr = solve_transport(supply, demand, [&](int i, int j) {
      if (i >= ns || j >= nd) return dump_cost_;
      return std::hypot(centers[i].x - target.atoms[j].p.x, centers[i].y - target.atoms[j].p.y);
    });
    if (pot) {
      pot->assign(m.size(), 0.0);
      const double shift = dump_supply ? tr.supply_potential[ns] : 0.0;
      for (int k = 0; k < ns; ++k) (*pot)[idx[k]] = tr.supply_potential[k] - shift;
    }
    return tr.cost;
  }

  AtomicMeasure fplus_, fminus_;
  double C_;
  int block_;
  double dump_cost_ = 1;
};

// Limited-memory BFGS two-loop recursion with the problem metric as the
// initial inverse Hessian. Curvature pairs with s.y <= 0 are skipped.
class Lbfgs {
 public:
  explicit Lbfgs(int m) : m_(m) {}
  void update(const Vec& s, const Vec& g_old, const Vec& g_new) {
    Vec y(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) y[k] = g_new[k] - g_old[k];
    const double sy = dot(s, y);
    if (!(sy > 1e-12 * std::sqrt(dot(s, s) * dot(y, y)))) return;
    if (static_cast<int>(S_.size()) == m_) {
      S_.erase(S_.begin());
      Y_.erase(Y_.begin());
      rho_.erase(rho_.begin());
    }
    S_.push_back(s);
    Y_.push_back(std::move(y));
    rho_.push_back(1.0 / sy);
  }
  void direction(const Vec& g, const Vec& mg, Problem& prob, Vec& d) {
    if (S_.empty()) {
      for (std::size_t k = 0; k < g.size(); ++k) d[k] = -mg[k];
      return;
    }
    Vec q = g;
    const int n = static_cast<int>(S_.size());
    std::vector<double> a(n);
    for (int i = n - 1; i >= 0; --i) {
      a[i] = rho_[i] * dot(S_[i], q);
      for (std::size_t k = 0; k < q.size(); ++k) q[k] -= a[i] * Y_[i][k];
    }
    Vec r;
    prob.metric_inverse(q, r);
    Vec my;
    prob.metric_inverse(Y_.back(), my);
    const double gamma = 1.0 / (rho_.back() * dot(Y_.back(), my));
    for (double& v : r) v *= gamma;
    for (int i = 0; i < n; ++i) {
      const double b = rho_[i] * dot(Y_[i], r);
      for (std::size_t k = 0; k < r.size(); ++k) r[k] += S_[i][k] * (a[i] - b);
    }
    for (std::size_t k = 0; k < r.size(); ++k) d[k] = -r[k];
  }

 private:
  int m_;
  std::vector<Vec> S_, Y_;
  std::vector<double> rho_;
};

ScalarField2D smooth_rhs(const SolverConfig& cfg, const AtomicMeasure& fplus,
                         const AtomicMeasure& fminus, double sigma) {
  ScalarField2D f = smooth_onto_grid(fplus, sigma, cfg.grid);
  f -= smooth_onto_grid(fminus, sigma, cfg.grid);
  return f;
}

double div_residual(const VectorField2D& u, const ScalarField2D& f) {
  const ScalarField2D d = divergence(u);
  double r = 0, pos = 0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    r += std::abs(d.values()[k] - f.values()[k]);
    pos += std::max(f.values()[k], 0.0);
  }
  if (pos == 0) return r * f.spec().cell_area();
  return r / pos;
}

// Smooth random stream function: a few low sine modes.
ScalarField2D random_psi(const GridSpec& g, std::uint64_t seed, double amplitude) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  constexpr int modes = 4;
  double coef[modes][modes];
  for (auto& row : coef)
    for (double& c : row) c = U(rng);
  ScalarField2D psi(g, Location::nodes);
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) {
      double s = 0;
      for (int k = 0; k < modes; ++k)
        for (int l = 0; l < modes; ++l)
          s += coef[k][l] / ((k + 1) * (l + 1)) * std::sin(std::numbers::pi * (k + 1) * i / g.nx) *
               std::sin(std::numbers::pi * (l + 1) * j / g.ny);
      psi(i, j) = amplitude * s;
    }
  return psi;
}

struct RunOutput {
  SolveResult result;
  double final_objective = 0;
  bool feasible = true;
};

RunOutput run_once(const SolverConfig& cfg, const AtomicMeasure& fplus,
                   const AtomicMeasure& fminus, int restart, const TraceCallback& cb) {
  RunOutput out;
  SolveResult& res = out.result;
  const GridSpec& grid = cfg.grid;
  const std::vector<double> deltas =
      cfg.delta_schedule.empty() ? default_deltas(cfg.eps_schedule, cfg.alpha) : cfg.delta_schedule;
  const ProfileConstants pc = profile_constants(cfg.alpha);
  const double theta_ref = std::max(max_atom_mass(fplus, fminus), 1e-300);
  const double total_mass = std::max(fplus.total(), 1e-300);
  const bool exact = cfg.mode == ConstraintMode::exact;

  std::unique_ptr<StreamPreconditioner> pre;
  if (exact && cfg.precondition) pre = std::make_unique<StreamPreconditioner>(grid);

  Vec x;
  ScalarField2D phi(grid);
  bool initialized = false;
  int logged = 0;
  for (std::size_t s = 0; s < cfg.eps_schedule.size(); ++s) {
    const double eps = cfg.eps_schedule[s];
    const double delta = deltas[s];
    const EnergyParams p = make_energy_params(cfg.alpha, eps, delta);
    StageSummary st;
    st.eps = eps;
    st.delta = delta;
    st.sigma = stage_sigma(cfg, eps, fplus, fminus);
    res.f = smooth_rhs(cfg, fplus, fminus, st.sigma);

    std::unique_ptr<Problem> prob;
    if (exact) {
      phi = poisson_solve(res.f, BoundaryCondition::neumann_zero_flux, 1e-12);
      if (pre) {
        const double A = optimal_amplitude(theta_ref, eps, pc);
        const double beta = p.exponents.beta;
        pre->set_coefficients(std::pow(eps, cfg.alpha + 1),
                              std::pow(eps, cfg.alpha - 1) * beta *
                                  std::pow(A * A + delta * delta, beta / 2 - 1) / 2);
      }
      prob = std::make_unique<ExactProblem>(phi, p, pre.get(), cfg.majorize_cg_iters,
                                            cfg.majorize_cg_tol);
    } else if (cfg.mode == ConstraintMode::quadratic) {
      prob = std::make_unique<QuadraticProblem>(grid, p, res.f, cfg.lambda);
    } else {
      prob = std::make_unique<W1Problem>(grid, p, fplus, fminus, cfg.w1_C, cfg.w1_block);
    }

    if (!initialized) {
      initialized = true;
      ScalarField2D psi0(grid, Location::nodes);
      if (cfg.init == InitKind::random)
        psi0 = random_psi(grid, cfg.seed + static_cast<std::uint64_t>(restart),
                          cfg.init_amplitude * total_mass);
      if (exact) {
        if (cfg.init == InitKind::warm_start) psi0 = helmholtz_project(*cfg.warm_start, res.f).psi;
        x = psi0.values();
      } else if (cfg.init == InitKind::warm_start) {
        x = FaceProblem::pack(*cfg.warm_start);
      } else if (cfg.init == InitKind::zero) {
        x = FaceProblem::pack(VectorField2D(grid));
      } else {
        VectorField2D u0 = curl_apply(psi0);
        u0 += gradient(poisson_solve(res.f, BoundaryCondition::neumann_zero_flux, 1e-12));
        x = FaceProblem::pack(u0);
      }
    }

    Vec g, d, mg, xn, last_disp(x.size(), 0.0), gn;
    Lbfgs lbfgs(cfg.lbfgs_memory);
    Eval e = prob->value_and_grad(x, g);
    double t = cfg.step_size;
    auto log = [&](int it, double step, double gnorm, const Eval& ev) {
      TraceEntry te;
      te.restart = restart;
      te.stage = static_cast<int>(s);
      te.iteration = it;
      te.eps = eps;
      te.delta = delta;
      te.concave = ev.concave;
      te.dirichlet = ev.dirichlet;
      te.energy = ev.concave + ev.dirichlet;
      te.objective = ev.objective;
      te.step = step;
      te.grad_norm = gnorm;
      const VectorField2D u = prob->field(x);
      te.div_residual = div_residual(u, res.f);
      te.mass = field_mass(u);
      res.energy_trace.push_back(te);
      ++logged;
      if (cb) cb(te);
    };
    prob->metric_inverse(g, mg);
    double gnorm = std::sqrt(std::max(0.0, dot(g, mg)));
    log(0, 0.0, gnorm, e);
    int it = 0;
    for (; it < cfg.steps_per_stage; ++it) {
      if (gnorm <= cfg.tol_grad * std::max(1.0, std::abs(e.objective))) break;
      d.resize(x.size());
      if (cfg.direction == DirectionKind::lbfgs) {
        lbfgs.direction(g, mg, *prob, d);
      } else if (cfg.direction == DirectionKind::majorize) {
        prob->majorize_step(x, g, d);
      } else {
        for (std::size_t k = 0; k < x.size(); ++k) d[k] = -mg[k] + cfg.momentum * last_disp[k];
      }
      double slope = dot(g, d);
      if (!(slope < 0)) {
        for (std::size_t k = 0; k < x.size(); ++k) d[k] = -mg[k];
        slope = dot(g, d);
      }
      if (!(slope < 0)) break;  // stationary to rounding
      const double current_mass =
          cfg.mass_bound_K && cfg.mass_guard_step ? field_mass(prob->field(x)) : 0.0;
      bool accepted = false;
      Eval en;
      for (int b = 0; b <= cfg.max_backtracks; ++b) {
        xn = x;
        for (std::size_t k = 0; k < x.size(); ++k) xn[k] += t * d[k];
        en = prob->value(xn);
        bool ok = std::isfinite(en.objective) && en.objective <= e.objective + cfg.armijo * t * slope;
        if (ok && cfg.mass_bound_K && cfg.mass_guard_step && current_mass <= *cfg.mass_bound_K)
          ok = field_mass(prob->field(xn)) <= *cfg.mass_bound_K;
        if (ok) {
          accepted = true;
          break;
        }
        t *= cfg.backtrack;
      }
      if (!accepted) {
        std::ostringstream os;
        if (gnorm <= 1e-6 * std::max(1.0, std::abs(e.objective))) {
          os << "stationary to rounding at iteration " << it;
        } else {
          st.failed = true;
          os << "line search failed after " << cfg.max_backtracks << " backtracks at iteration "
             << it;
        }
        st.message = os.str();
        break;
      }
      for (std::size_t k = 0; k < x.size(); ++k) last_disp[k] = xn[k] - x[k];
      x.swap(xn);
      gn = g;
      e = prob->value_and_grad(x, g);
      if (cfg.direction == DirectionKind::lbfgs) lbfgs.update(last_disp, gn, g);
      prob->metric_inverse(g, mg);
      gnorm = std::sqrt(std::max(0.0, dot(g, mg)));
      ++st.accepted;
      log(it + 1, t, gnorm, e);
      t = cfg.direction == DirectionKind::gradient ? std::min(t / cfg.backtrack, 1e6) : 1.0;
    }
    st.iterations = it;
    st.objective = e.objective;
    st.grad_norm = gnorm;
    res.stages.push_back(st);

    if (s + 1 == cfg.eps_schedule.size()) {
      res.u = prob->field(x);
      res.final_energy = energy(res.u, p);
      res.final_energy_delta0 = energy(res.u, make_energy_params(cfg.alpha, eps, 0.0));
      out.final_objective = e.objective;
    }
  }
  (void)logged;
  if (exact) {
    res.psi = ScalarField2D(grid, Location::nodes);
    res.psi.values() = x;
    res.phi = phi;
  }
  res.div_residual = div_residual(res.u, res.f);
  res.mass = field_mass(res.u);
  res.mass_feasible = !cfg.mass_bound_K || res.mass <= *cfg.mass_bound_K;
  out.feasible = res.mass_feasible;
  res.converged = std::none_of(res.stages.begin(), res.stages.end(),
                               [](const StageSummary& s) { return s.failed; });
  if (exact && res.div_residual > 1e-6) {
    std::ostringstream os;
    os << "exact-mode divergence residual " << res.div_residual << " exceeds 1e-6";
    fail(ErrorCode::numeric, os.str());
  }
  return out;
}

}  // namespace

SolveResult solve(const SolverConfig& cfg, const AtomicMeasure& fplus,
                  const AtomicMeasure& fminus, const TraceCallback& on_iterate) {
  cfg.validate();
  for (const AtomicMeasure* m : {&fplus, &fminus})
    for (const Atom& a : m->atoms)
      require(a.mass >= 0, ErrorCode::domain, "source and sink atoms need non-negative masses");
  const double sp = fplus.total(), sm = fminus.total();
  if (std::abs(sp - sm) > 1e-10 * std::max(sp, sm)) {
    std::ostringstream os;
    os.precision(17);
    os << "source and sink masses differ: " << sp << " vs " << sm;
    fail(ErrorCode::compatibility, os.str());
  }

  std::vector<RunOutput> runs(cfg.restarts);
  if (cfg.parallel_restarts && cfg.restarts > 1) {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(cfg.restarts);
    for (int r = 0; r < cfg.restarts; ++r)
      pool.emplace_back([&, r] {
        try {
          runs[r] = run_once(cfg, fplus, fminus, r, {});
        } catch (...) {
          errors[r] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
    if (on_iterate)
      for (const RunOutput& r : runs)
        for (const TraceEntry& te : r.result.energy_trace) on_iterate(te);
  } else {
    for (int r = 0; r < cfg.restarts; ++r) runs[r] = run_once(cfg, fplus, fminus, r, on_iterate);
  }

  int best = 0;
  for (int r = 1; r < cfg.restarts; ++r) {
    const RunOutput& a = runs[r];
    const RunOutput& b = runs[best];
    if ((a.feasible && !b.feasible) ||
        (a.feasible == b.feasible && a.final_objective < b.final_objective))
      best = r;
  }
  SolveResult res = std::move(runs[best].result);
  res.best_restart = best;
  std::vector<TraceEntry> trace;
  for (int r = 0; r < cfg.restarts; ++r) {
    res.restart_objectives.push_back(runs[r].final_objective);
    const auto& tr = r == best ? res.energy_trace : runs[r].result.energy_trace;
    trace.insert(trace.end(), tr.begin(), tr.end());
  }
  res.energy_trace = std::move(trace);
  return res;
}

}  // namespace elbranch
