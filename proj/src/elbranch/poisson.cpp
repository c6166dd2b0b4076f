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

#include "elbranch/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "elbranch/error.hpp"

namespace elbranch {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

void remove_mean(std::vector<double>& v, const std::vector<char>* active) {
  double s = 0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < v.size(); ++k)
    if (!active || (*active)[k]) {
      s += v[k];
      ++n;
    }
  if (n == 0) return;
  const double m = s / static_cast<double>(n);
  for (std::size_t k = 0; k < v.size(); ++k)
    if (!active || (*active)[k]) v[k] -= m;
}

// ---------------------------------------------------------------- multigrid

struct Level {
  int nx = 0, ny = 0;
  double hx = 0, hy = 0;
  std::vector<double> u, f, r;
};

class Multigrid {
 public:
  Multigrid(int nx, int ny, double hx, double hy, BoundaryCondition bc) : bc_(bc) {
    Level l0{nx, ny, hx, hy, {}, {}, {}};
    levels_.push_back(l0);
    while (levels_.back().nx % 2 == 0 && levels_.back().ny % 2 == 0 &&
           levels_.back().nx >= 8 && levels_.back().ny >= 8) {
      const Level& p = levels_.back();
      levels_.push_back(Level{p.nx / 2, p.ny / 2, 2 * p.hx, 2 * p.hy, {}, {}, {}});
    }
    for (Level& l : levels_) {
      const std::size_t n = static_cast<std::size_t>(l.nx) * l.ny;
      l.u.assign(n, 0.0);
      l.f.assign(n, 0.0);
      l.r.assign(n, 0.0);
    }
  }

  bool coarsens() const { return levels_.size() > 1; }

  void laplacian(const Level& l, const std::vector<double>& u, std::vector<double>& out) const {
    const double ax = 1.0 / (l.hx * l.hx), ay = 1.0 / (l.hy * l.hy);
    const bool dir = bc_ == BoundaryCondition::dirichlet_zero;
    for (int j = 0; j < l.ny; ++j)
      for (int i = 0; i < l.nx; ++i) {
        const std::size_t k = static_cast<std::size_t>(j) * l.nx + i;
        const double c = u[k];
        double s = 0;
        if (i > 0) s += ax * (u[k - 1] - c); else if (dir) s -= 2 * ax * c;
        if (i < l.nx - 1) s += ax * (u[k + 1] - c); else if (dir) s -= 2 * ax * c;
        if (j > 0) s += ay * (u[k - l.nx] - c); else if (dir) s -= 2 * ay * c;
        if (j < l.ny - 1) s += ay * (u[k + l.nx] - c); else if (dir) s -= 2 * ay * c;
        out[k] = s;
      }
  }

  void smooth(Level& l, int sweeps) const {
    const double ax = 1.0 / (l.hx * l.hx), ay = 1.0 / (l.hy * l.hy);
    const bool dir = bc_ == BoundaryCondition::dirichlet_zero;
    for (int s = 0; s < sweeps; ++s)
      for (int color = 0; color < 2; ++color)
        for (int j = 0; j < l.ny; ++j)
          for (int i = (j + color) % 2; i < l.nx; i += 2) {
            const std::size_t k = static_cast<std::size_t>(j) * l.nx + i;
            double off = 0, diag = 0;
            if (i > 0) { off += ax * l.u[k - 1]; diag -= ax; } else if (dir) diag -= 2 * ax;
            if (i < l.nx - 1) { off += ax * l.u[k + 1]; diag -= ax; } else if (dir) diag -= 2 * ax;
            if (j > 0) { off += ay * l.u[k - l.nx]; diag -= ay; } else if (dir) diag -= 2 * ay;
            if (j < l.ny - 1) { off += ay * l.u[k + l.nx]; diag -= ay; } else if (dir) diag -= 2 * ay;
            l.u[k] = (l.f[k] - off) / diag;
          }
  }

  void residual(Level& l) const {
    laplacian(l, l.u, l.r);
    for (std::size_t k = 0; k < l.r.size(); ++k) l.r[k] = l.f[k] - l.r[k];
  }

  void solve_coarsest(Level& l) const {
    const bool neu = bc_ == BoundaryCondition::neumann_zero_flux;
    if (neu) remove_mean(l.f, nullptr);
    std::vector<double> rhs(l.f.size());
    for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] = -l.f[k];
    std::vector<double> diag(l.f.size(), 1.0);
    auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
      laplacian(l, x, y);
      for (double& v : y) v = -v;
    };
    std::fill(l.u.begin(), l.u.end(), 0.0);
    conjugate_gradient(apply, diag, rhs, l.u, 1e-14, 20 * static_cast<int>(l.u.size()) + 100,
                       nullptr, neu);
  }

  void vcycle(std::size_t li) {
    Level& l = levels_[li];
    if (li + 1 == levels_.size()) {
      solve_coarsest(l);
      return;
    }
    smooth(l, 2);
    residual(l);
    Level& c = levels_[li + 1];
    for (int J = 0; J < c.ny; ++J)
      for (int I = 0; I < c.nx; ++I) {
        const std::size_t f0 = static_cast<std::size_t>(2 * J) * l.nx + 2 * I;
        c.f[static_cast<std::size_t>(J) * c.nx + I] =
            0.25 * (l.r[f0] + l.r[f0 + 1] + l.r[f0 + l.nx] + l.r[f0 + l.nx + 1]);
      }
    if (bc_ == BoundaryCondition::neumann_zero_flux) remove_mean(c.f, nullptr);
    std::fill(c.u.begin(), c.u.end(), 0.0);
    vcycle(li + 1);
    prolong_add(c, l);
    smooth_reverse(l, 2);
  }

  // Post-smoothing in black-red order keeps the cycle symmetric.
  void smooth_reverse(Level& l, int sweeps) const {
    const double ax = 1.0 / (l.hx * l.hx), ay = 1.0 / (l.hy * l.hy);
    const bool dir = bc_ == BoundaryCondition::dirichlet_zero;
    for (int s = 0; s < sweeps; ++s)
      for (int color = 1; color >= 0; --color)
        for (int j = 0; j < l.ny; ++j)
          for (int i = (j + color) % 2; i < l.nx; i += 2) {
            const std::size_t k = static_cast<std::size_t>(j) * l.nx + i;
            double off = 0, diag = 0;
            if (i > 0) { off += ax * l.u[k - 1]; diag -= ax; } else if (dir) diag -= 2 * ax;
            if (i < l.nx - 1) { off += ax * l.u[k + 1]; diag -= ax; } else if (dir) diag -= 2 * ax;
            if (j > 0) { off += ay * l.u[k - l.nx]; diag -= ay; } else if (dir) diag -= 2 * ay;
            if (j < l.ny - 1) { off += ay * l.u[k + l.nx]; diag -= ay; } else if (dir) diag -= 2 * ay;
            l.u[k] = (l.f[k] - off) / diag;
          }
  }

  // Bilinear cell-centered interpolation (9/16, 3/16, 3/16, 1/16); ghost
  // values mirror (Neumann) or flip sign (Dirichlet).
  void prolong_add(const Level& c, Level& f) const {
    const double sgn = bc_ == BoundaryCondition::dirichlet_zero ? -1.0 : 1.0;
    auto at = [&](int I, int J, int I0, int J0) {
      double s = 1.0;
      if (I < 0 || I >= c.nx) { I = I0; s *= sgn; }
      if (J < 0 || J >= c.ny) { J = J0; s *= sgn; }
      return s * c.u[static_cast<std::size_t>(J) * c.nx + I];
    };
    for (int j = 0; j < f.ny; ++j)
      for (int i = 0; i < f.nx; ++i) {
        const int I = i / 2, J = j / 2;
        const int In = (i % 2 == 0) ? I - 1 : I + 1;
        const int Jn = (j % 2 == 0) ? J - 1 : J + 1;
        const double v = 0.5625 * at(I, J, I, J) + 0.1875 * at(In, J, I, J) +
                         0.1875 * at(I, Jn, I, J) + 0.0625 * at(In, Jn, I, J);
        f.u[static_cast<std::size_t>(j) * f.nx + i] += v;
      }
  }

  Level& finest() { return levels_.front(); }

 private:
  BoundaryCondition bc_;
  std::vector<Level> levels_;
};

void check_neumann_compatible(const ScalarField2D& rhs, double tol) {
  const double s = rhs.sum();
  const double l1 = rhs.norm_l1() / rhs.spec().cell_area();
  if (std::abs(s) > tol * l1 + 1e-300) {
    std::ostringstream os;
    os << "incompatible Neumann data: integral " << s * rhs.spec().cell_area()
       << " vs ||rhs||_1 " << rhs.norm_l1();
    fail(ErrorCode::compatibility, os.str());
  }
}

}  // namespace

CgResult conjugate_gradient(
    const std::function<void(const std::vector<double>&, std::vector<double>&)>& apply,
    const std::vector<double>& diag, const std::vector<double>& rhs, std::vector<double>& x,
    double tol, int max_iter, const std::vector<char>* active, bool project_mean) {
  const std::size_t n = rhs.size();
  CgResult res;
  std::vector<double> r(n), z(n), p(n), ap(n);
  std::vector<double> b = rhs;
  if (project_mean) remove_mean(b, active);
  const double bnorm = norm2(b);
  if (bnorm == 0) {
    std::fill(x.begin(), x.end(), 0.0);
    res.converged = true;
    return res;
  }
  apply(x, ap);
  for (std::size_t k = 0; k < n; ++k) r[k] = (!active || (*active)[k]) ? b[k] - ap[k] : 0.0;
  if (project_mean) remove_mean(r, active);
  auto precond = [&](const std::vector<double>& in, std::vector<double>& out) {
    for (std::size_t k = 0; k < n; ++k)
      out[k] = (!active || (*active)[k]) ? in[k] / diag[k] : 0.0;
    if (project_mean) remove_mean(out, active);
  };
  precond(r, z);
  p = z;
  double rz = dot(r, z);
  for (int it = 0; it < max_iter; ++it) {
    const double rn = norm2(r);
    res.residual = rn / bnorm;
    res.iterations = it;
    if (rn <= tol * bnorm) {
      res.converged = true;
      break;
    }
    apply(p, ap);
    if (active)
      for (std::size_t k = 0; k < n; ++k)
        if (!(*active)[k]) ap[k] = 0.0;
    const double pap = dot(p, ap);
    if (!(pap > 0)) break;
    const double a = rz / pap;
    for (std::size_t k = 0; k < n; ++k) {
      x[k] += a * p[k];
      r[k] -= a * ap[k];
    }
    precond(r, z);
    const double rz_new = dot(r, z);
    const double bcoef = rz_new / rz;
    rz = rz_new;
    for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + bcoef * p[k];
  }
  if (!res.converged) {
    const double rn = norm2(r);
    res.residual = rn / bnorm;
    res.converged = rn <= tol * bnorm;
  }
  if (project_mean) remove_mean(x, active);
  return res;
}

ScalarField2D apply_laplacian(const ScalarField2D& phi, BoundaryCondition bc) {
  require(phi.location() == Location::cells, ErrorCode::dimension,
          "Laplacian expects a cell-centered field");
  const GridSpec& g = phi.spec();
  Multigrid mg(g.nx, g.ny, g.hx, g.hy, bc);
  ScalarField2D out(g);
  mg.laplacian(mg.finest(), phi.values(), out.values());
  return out;
}

ScalarField2D poisson_solve(const ScalarField2D& rhs, BoundaryCondition bc, double tol,
                            PoissonStats* stats) {
  require(rhs.location() == Location::cells, ErrorCode::dimension,
          "poisson_solve expects a cell-centered right-hand side");
  require(tol > 0, ErrorCode::domain, "poisson tolerance must be positive");
  const GridSpec& g = rhs.spec();
  const bool neu = bc == BoundaryCondition::neumann_zero_flux;
  if (neu) check_neumann_compatible(rhs, tol);

  ScalarField2D phi(g);
  PoissonStats st;
  std::vector<double> f = rhs.values();
  if (neu) remove_mean(f, nullptr);
  const double fnorm = norm2(f);
  if (fnorm == 0) {
    if (stats) *stats = st;
    return phi;
  }

  Multigrid mg(g.nx, g.ny, g.hx, g.hy, bc);
  Level& l0 = mg.finest();
  l0.f = f;
  std::fill(l0.u.begin(), l0.u.end(), 0.0);
  double rel = 1.0;
  bool done = false;
  if (mg.coarsens()) {
    double prev = 1.0;
    for (int cycle = 0; cycle < 100; ++cycle) {
      mg.residual(l0);
      rel = norm2(l0.r) / fnorm;
      st.cycles = cycle;
      if (rel <= tol) {
        done = true;
        break;
      }
      // Stagnation at round-off level: hand over to CG below.
      if (cycle > 4 && rel > 0.7 * prev) break;
      prev = rel;
      mg.vcycle(0);
      if (neu) remove_mean(l0.u, nullptr);
    }
  }
  if (!done) {
    st.used_cg = true;
    std::vector<double> b(f.size());
    for (std::size_t k = 0; k < b.size(); ++k) b[k] = -f[k];
    const double ax = 1.0 / (g.hx * g.hx), ay = 1.0 / (g.hy * g.hy);
    std::vector<double> diag(f.size(), 2 * ax + 2 * ay);
    auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
      mg.laplacian(l0, x, y);
      for (double& v : y) v = -v;
    };
    CgResult cg = conjugate_gradient(apply, diag, b, l0.u, tol, 20 * (g.nx + g.ny) + 2000,
                                     nullptr, neu);
    rel = cg.residual;
    st.cycles += cg.iterations;
    if (!cg.converged) {
      std::ostringstream os;
      os << "Poisson solve did not converge: relative residual " << rel << " > " << tol;
      fail(ErrorCode::numeric, os.str());
    }
  }
  if (neu) remove_mean(l0.u, nullptr);
  phi.values() = l0.u;
  st.residual = rel;
  if (stats) *stats = st;
  return phi;
}

namespace {

struct MaskedOp {
  const GridSpec& g;
  const std::vector<char>& mask;
  bool dir;

  void apply(const std::vector<double>& u, std::vector<double>& out) const {
    const double ax = 1.0 / (g.hx * g.hx), ay = 1.0 / (g.hy * g.hy);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const std::size_t k = static_cast<std::size_t>(j) * g.nx + i;
        if (!mask[k]) {
          out[k] = 0.0;
          continue;
        }
        const double c = u[k];
        double s = 0;
        auto nb = [&](bool inside, std::size_t kn, double a) {
          if (inside && mask[kn]) s += a * (u[kn] - c);
          else if (dir) s -= a * c;
        };
        nb(i > 0, k - 1, ax);
        nb(i < g.nx - 1, k + 1, ax);
        nb(j > 0, k - g.nx, ay);
        nb(j < g.ny - 1, k + g.nx, ay);
        out[k] = s;
      }
  }

  std::vector<double> diagonal() const {
    const double ax = 1.0 / (g.hx * g.hx), ay = 1.0 / (g.hy * g.hy);
    std::vector<double> d(mask.size(), 1.0);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const std::size_t k = static_cast<std::size_t>(j) * g.nx + i;
        if (!mask[k]) continue;
        double s = 0;
        auto nb = [&](bool inside, std::size_t kn, double a) {
          if ((inside && mask[kn]) || dir) s += a;
        };
        nb(i > 0, k - 1, ax);
        nb(i < g.nx - 1, k + 1, ax);
        nb(j > 0, k - g.nx, ay);
        nb(j < g.ny - 1, k + g.nx, ay);
        d[k] = s > 0 ? s : 1.0;
      }
    return d;
  }
};

}  // namespace

ScalarField2D apply_masked_laplacian(const ScalarField2D& phi, const std::vector<char>& mask,
                                     BoundaryCondition bc) {
  require(mask.size() == phi.size(), ErrorCode::dimension, "mask size mismatch");
  MaskedOp op{phi.spec(), mask, bc == BoundaryCondition::dirichlet_zero};
  ScalarField2D out(phi.spec());
  op.apply(phi.values(), out.values());
  return out;
}

ScalarField2D masked_poisson_solve(const ScalarField2D& rhs, const std::vector<char>& mask,
                                   BoundaryCondition bc, double tol, PoissonStats* stats) {
  require(rhs.location() == Location::cells, ErrorCode::dimension,
          "masked_poisson_solve expects a cell-centered right-hand side");
  require(mask.size() == rhs.size(), ErrorCode::dimension, "mask size mismatch");
  const GridSpec& g = rhs.spec();
  const bool neu = bc == BoundaryCondition::neumann_zero_flux;
  std::vector<double> b(rhs.size(), 0.0);
  double s = 0, l1 = 0;
  for (std::size_t k = 0; k < b.size(); ++k)
    if (mask[k]) {
      b[k] = -rhs.values()[k];
      s += rhs.values()[k];
      l1 += std::abs(rhs.values()[k]);
    }
  if (neu && std::abs(s) > tol * l1 + 1e-300) {
    std::ostringstream os;
    os << "incompatible Neumann data on masked domain: integral " << s * g.cell_area()
       << " vs ||rhs||_1 " << l1 * g.cell_area();
    fail(ErrorCode::compatibility, os.str());
  }
  MaskedOp op{g, mask, !neu};
  auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
    op.apply(x, y);
    for (double& v : y) v = -v;
  };
  ScalarField2D phi(g);
  const int n_active = static_cast<int>(std::count(mask.begin(), mask.end(), 1));
  CgResult cg = conjugate_gradient(apply, op.diagonal(), b, phi.values(), tol,
                                   10 * n_active + 1000, &mask, neu);
  if (!cg.converged) {
    std::ostringstream os;
    os << "masked Poisson solve did not converge: relative residual " << cg.residual;
    fail(ErrorCode::numeric, os.str());
  }
  if (stats) {
    stats->cycles = cg.iterations;
    stats->residual = cg.residual;
    stats->used_cg = true;
  }
  return phi;
}

HelmholtzResult helmholtz_project(const VectorField2D& u, const ScalarField2D& f, double tol) {
  require(u.spec() == f.spec() && f.location() == Location::cells, ErrorCode::dimension,
          "helmholtz_project: field and divergence data on different grids");
  HelmholtzResult out;
  out.phi = poisson_solve(f, BoundaryCondition::neumann_zero_flux, tol);
  const VectorField2D grad_phi = gradient(out.phi);
  VectorField2D w = u;
  w -= grad_phi;
  w.zero_boundary();
  const ScalarField2D q =
      poisson_solve(divergence(w), BoundaryCondition::neumann_zero_flux, tol);
  w -= gradient(q);
  out.psi = stream_function(w);
  // Close the potential on the top/right boundary rows exactly.
  const GridSpec& g = u.spec();
  for (int i = 0; i <= g.nx; ++i) out.psi(i, 0) = out.psi(i, g.ny) = 0.0;
  for (int j = 0; j <= g.ny; ++j) out.psi(0, j) = out.psi(g.nx, j) = 0.0;
  out.u = grad_phi;
  out.u += curl_apply(out.psi);
  return out;
}

}  // namespace elbranch
