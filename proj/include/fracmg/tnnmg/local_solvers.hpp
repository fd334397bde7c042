#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <vector>

#include "fracmg/fem/assembly.hpp"
#include "fracmg/increment/problem.hpp"
#include "fracmg/tnnmg/config.hpp"

namespace fracmg {

/// Quadrature points of the cells around one vertex, with the shape data of
/// that vertex and the current field values.
struct PatchPoint {
  double w = 0.0;
  double theta = 0.0;
  double gx = 0.0, gy = 0.0;
  SymTensor<2> eps;
  double d = 0.0;
  std::array<double, 2> grad_d{};
};

struct VertexPatch {
  int vertex = -1;
  int n = 0;
  std::array<PatchPoint, 16> pts;
};

inline VertexPatch build_patch(const StructuredGrid& g, const std::vector<double>& x, int v) {
  VertexPatch patch;
  patch.vertex = v;
  const int i = g.vi(v), j = g.vj(v);
  const QuadratureData& q = g.quad;
  for (int cj = j - 1; cj <= j; ++cj)
    for (int ci = i - 1; ci <= i; ++ci) {
      if (ci < 0 || cj < 0 || ci >= g.nx || cj >= g.ny) continue;
      const int cell = cj * g.nx + ci;
      const int a = (i - ci) + 2 * (j - cj);
      const auto cd = detail::gather(g, x, cell);
      for (int al = 0; al < QuadratureData::kPoints; ++al) {
        const QpValues qv = detail::eval_qp(q, cd.x, al);
        PatchPoint& pt = patch.pts[patch.n++];
        pt.w = q.weight[al];
        pt.theta = q.value[al][a];
        pt.gx = q.grad[al][a][0];
        pt.gy = q.grad[al][a][1];
        pt.eps = qv.eps;
        pt.d = qv.d;
        pt.grad_d = qv.grad_d;
      }
    }
  return patch;
}

namespace detail {

inline SymTensor<2> shifted_strain(const PatchPoint& pt, const std::array<double, 2>& s) {
  SymTensor<2> e = pt.eps;
  e(0, 0) += pt.gx * s[0];
  e(1, 1) += pt.gy * s[1];
  e(0, 1) += 0.5 * (pt.gy * s[0] + pt.gx * s[1]);
  return e;
}

/// Local displacement energy of the patch at shift s (constant terms dropped).
inline double local_u_energy(const MaterialModel& m, const VertexPatch& patch, const std::array<double, 16>& fac,
                             const std::array<double, 2>& s, const std::array<double, 2>& f_ext) {
  double e = -(f_ext[0] * s[0] + f_ext[1] * s[1]);
  for (int k = 0; k < patch.n; ++k) {
    const auto sp = split_energy<2>(m, shifted_strain(patch.pts[k], s), Order::Value);
    e += patch.pts[k].w * (fac[k] * sp.psi_plus + sp.psi_minus);
  }
  return e;
}

/// Local gradient and Hessian with respect to the vertex displacement.
inline void local_u_derivatives(const MaterialModel& m, const VertexPatch& patch, const std::array<double, 16>& fac,
                                const std::array<double, 2>& s, const std::array<double, 2>& f_ext,
                                std::array<double, 2>& grad, SmallMatrix<2>& hess) {
  grad = {-f_ext[0], -f_ext[1]};
  hess = SmallMatrix<2>{};
  for (int k = 0; k < patch.n; ++k) {
    const PatchPoint& pt = patch.pts[k];
    const auto sp = split_energy<2>(m, shifted_strain(pt, s), Order::Hessian);
    const SymTensor<2> sig = fac[k] * sp.stress_plus + sp.stress_minus;
    const MandelMatrix<2> H = fac[k] * sp.hess_plus + sp.hess_minus;
    grad[0] += pt.w * (pt.gx * sig(0, 0) + pt.gy * sig(0, 1));
    grad[1] += pt.w * (pt.gx * sig(0, 1) + pt.gy * sig(1, 1));
    const SmallMatrix<2> bhb = btdb(H, pt.gx, pt.gy, pt.gx, pt.gy);
    for (int a = 0; a < 4; ++a) hess.a[a] += pt.w * bhb.a[a];
  }
}

/// Solves the free-component subsystem H s = -g; false if singular.
inline bool newton_step(const SmallMatrix<2>& H, const std::array<double, 2>& g, const std::array<bool, 2>& free,
                        std::array<double, 2>& step) {
  step = {0.0, 0.0};
  if (free[0] && free[1]) {
    const double det = H(0, 0) * H(1, 1) - H(0, 1) * H(1, 0);
    const double scale = std::abs(H(0, 0) * H(1, 1)) + std::abs(H(0, 1) * H(1, 0));
    if (!(std::abs(det) > 1e-14 * scale)) return false;
    step[0] = -(H(1, 1) * g[0] - H(0, 1) * g[1]) / det;
    step[1] = -(-H(1, 0) * g[0] + H(0, 0) * g[1]) / det;
    return true;
  }
  for (int c = 0; c < 2; ++c)
    if (free[c]) {
      if (!(H(c, c) > 0.0)) return false;
      step[c] = -g[c] / H(c, c);
    }
  return true;
}

inline double free_norm(const std::array<double, 2>& g, const std::array<bool, 2>& free) {
  double s = 0.0;
  for (int c = 0; c < 2; ++c)
    if (free[c]) s += g[c] * g[c];
  return std::sqrt(s);
}

}  // namespace detail

/// Minimizes the local displacement problem of `patch.vertex`; returns the
/// shift and updates the strains stored in the patch. `damage_factor[k]` is
/// g(d) + k at patch point k.
inline std::array<double, 2> solve_local_displacement(const MaterialModel& m, VertexPatch& patch,
                                                      const std::array<double, 16>& damage_factor,
                                                      const std::array<bool, 2>& free,
                                                      const std::array<double, 2>& f_ext, SmootherVariant variant,
                                                      const TnnmgConfig& cfg) {
  std::array<double, 2> s{0.0, 0.0}, g, step;
  SmallMatrix<2> H;
  if (!free[0] && !free[1]) return s;

  if (variant == SmootherVariant::PRE) {
    // Majorizing model: (1 + k) psi_0'' on the patch, constant in eps.
    detail::local_u_derivatives(m, patch, damage_factor, s, f_ext, g, H);
    const MandelMatrix<2> C0 = (1.0 + m.k) * undamaged_hessian<2>(m);
    SmallMatrix<2> C;
    for (int k = 0; k < patch.n; ++k) {
      const auto& pt = patch.pts[k];
      const SmallMatrix<2> bcb = detail::btdb(C0, pt.gx, pt.gy, pt.gx, pt.gy);
      for (int a = 0; a < 4; ++a) C.a[a] += patch.pts[k].w * bcb.a[a];
    }
    const bool ok = detail::newton_step(C, g, free, step);
    assert(ok);
    if (ok) s = step;
  } else {
    detail::local_u_derivatives(m, patch, damage_factor, s, f_ext, g, H);
    const double tol = cfg.local_newton_tol * (1.0 + detail::free_norm(g, free));
    double e = detail::local_u_energy(m, patch, damage_factor, s, f_ext);
    for (int it = 0; it < cfg.local_newton_steps; ++it) {
      if (detail::free_norm(g, free) <= tol) break;
      if (!detail::newton_step(H, g, free, step)) break;
      double t = 1.0;
      bool accepted = false;
      std::array<double, 2> trial{};
      double et = e;
      for (int h = 0; h <= cfg.max_halvings; ++h, t *= 0.5) {
        trial = {s[0] + t * step[0], s[1] + t * step[1]};
        et = detail::local_u_energy(m, patch, damage_factor, trial, f_ext);
        if (et <= e) {
          accepted = true;
          break;
        }
      }
      if (!accepted || (trial[0] == s[0] && trial[1] == s[1])) break;
      s = trial;
      e = et;
      detail::local_u_derivatives(m, patch, damage_factor, s, f_ext, g, H);
    }
  }
  for (int k = 0; k < patch.n; ++k) patch.pts[k].eps = detail::shifted_strain(patch.pts[k], s);
  return s;
}

/// Minimizes the local damage problem of `patch.vertex` over the shift
/// interval [lo, hi]. `psi_plus[k]` is psi_0^+ at patch point k.
inline double solve_local_damage(const MaterialModel& m, const VertexPatch& patch,
                                 const std::array<double, 16>& psi_plus, double lo, double hi, double f_ext) {
  const double gc = m.g_c, cg = m.c_gamma();
  const double lgc = cg / m.c_l() * m.l * m.l;  // gradient coefficient of gamma
  auto derivs = [&](double s, double& f1, double& f2) {
    f1 = -f_ext;
    f2 = 0.0;
    for (int k = 0; k < patch.n; ++k) {
      const PatchPoint& pt = patch.pts[k];
      const double dq = std::clamp(pt.d + s * pt.theta, 0.0, 1.0);
      const DegradationValue gv = degradation_unchecked(m.degradation, dq);
      const LocalDensity w = local_density(m.beta, pt.d + s * pt.theta);
      const double gg = (pt.grad_d[0] + s * pt.gx) * pt.gx + (pt.grad_d[1] + s * pt.gy) * pt.gy;
      const double tt = pt.gx * pt.gx + pt.gy * pt.gy;
      f1 += pt.w * (gv.dg * psi_plus[k] * pt.theta + gc * (cg * w.dw * pt.theta + 2.0 * lgc * gg));
      f2 += pt.w * (gv.d2g * psi_plus[k] * pt.theta * pt.theta + gc * (cg * w.d2w * pt.theta * pt.theta + 2.0 * lgc * tt));
    }
  };
  if (!(lo <= 0.0 && hi >= 0.0)) return 0.0;

  double f1, f2;
  derivs(0.0, f1, f2);
  if (m.degradation.is_quadratic()) {
    // Exact minimizer of a strictly convex quadratic on an interval.
    assert(f2 > 0.0);
    if (!(f2 > 0.0)) return 0.0;
    return std::clamp(-f1 / f2, lo, hi);
  }

  auto value = [&](double s) {
    double e = -f_ext * s;
    for (int k = 0; k < patch.n; ++k) {
      const PatchPoint& pt = patch.pts[k];
      const double dq = std::clamp(pt.d + s * pt.theta, 0.0, 1.0);
      const double gq = degradation_unchecked(m.degradation, dq).g;
      const LocalDensity w = local_density(m.beta, pt.d + s * pt.theta);
      const double gx = pt.grad_d[0] + s * pt.gx, gy = pt.grad_d[1] + s * pt.gy;
      e += pt.w * (gq * psi_plus[k] + gc * (cg * w.w + lgc * (gx * gx + gy * gy)));
    }
    return e;
  };
  // Safeguarded projected Newton; every accepted step decreases the value.
  double s = 0.0, fs = value(0.0);
  const double tol = 1e-14 * (1.0 + std::abs(f1));
  for (int it = 0; it < 60; ++it) {
    if (it > 0) derivs(s, f1, f2);
    if ((s <= lo && f1 >= 0.0) || (s >= hi && f1 <= 0.0) || std::abs(f1) <= tol) break;
    const double target = f2 > 0.0 ? std::clamp(s - f1 / f2, lo, hi) : (f1 > 0.0 ? lo : hi);
    const double step = target - s;
    if (step == 0.0) break;
    double t = 1.0, trial = s, ft = fs;
    bool accepted = false;
    for (int h = 0; h < 60; ++h, t *= 0.5) {
      trial = s + t * step;
      ft = value(trial);
      if (ft <= fs) {
        accepted = true;
        break;
      }
    }
    if (!accepted || trial == s) break;
    s = trial;
    fs = ft;
  }
  return s;
}

/// Local update of the displacement at vertex v (Dirichlet components kept).
inline State smooth_vertex_displacement(const IncrementProblem& p, State s, int v, SmootherVariant variant,
                                        const TnnmgConfig& cfg = {}) {
  VertexPatch patch = build_patch(p.grid, s.x, v);
  std::array<double, 16> fac{};
  for (int k = 0; k < patch.n; ++k)
    fac[k] = degradation(p.model.degradation, std::clamp(patch.pts[k].d, 0.0, 1.0)).g + p.model.k;
  const std::array<bool, 2> free{!p.is_fixed(kBlock * v), !p.is_fixed(kBlock * v + 1)};
  std::array<double, 2> f{0.0, 0.0};
  if (!p.external_load.empty()) f = {p.external_load[kBlock * v], p.external_load[kBlock * v + 1]};
  const auto shift = solve_local_displacement(p.model, patch, fac, free, f, variant, cfg);
  s.u(v, 0) += shift[0];
  s.u(v, 1) += shift[1];
  return s;
}

/// Local update of the damage at vertex v, clamped to [d_n, 1].
inline State smooth_vertex_damage(const IncrementProblem& p, State s, int v) {
  if (p.is_fixed(kBlock * v + kDim)) return s;
  VertexPatch patch = build_patch(p.grid, s.x, v);
  std::array<double, 16> pp{};
  for (int k = 0; k < patch.n; ++k) pp[k] = split_energy<2>(p.model, patch.pts[k].eps, Order::Value).psi_plus;
  const double dv = s.d(v);
  const double f = p.external_load.empty() ? 0.0 : p.external_load[kBlock * v + kDim];
  const double shift = solve_local_damage(p.model, patch, pp, p.obstacle[v] - dv, 1.0 - dv, f);
  s.d(v) = std::clamp(dv + shift, p.obstacle[v], 1.0);
  return s;
}

/// One nonlinear Gauss-Seidel sweep in lexicographic vertex order, the
/// displacement before the damage at every vertex.
inline void presmooth_inplace(const IncrementProblem& p, std::vector<double>& x, const TnnmgConfig& cfg) {
  const MaterialModel& m = p.model;
  const bool has_load = !p.external_load.empty();
  std::array<double, 16> fac{}, pp{};
  for (int v = 0; v < p.num_vertices(); ++v) {
    VertexPatch patch = build_patch(p.grid, x, v);
    const int base = kBlock * v;
    const std::array<bool, 2> free{!p.is_fixed(base), !p.is_fixed(base + 1)};
    if (free[0] || free[1]) {
      for (int k = 0; k < patch.n; ++k)
        fac[k] = degradation_unchecked(m.degradation, std::clamp(patch.pts[k].d, 0.0, 1.0)).g + m.k;
      std::array<double, 2> f{0.0, 0.0};
      if (has_load) f = {p.external_load[base], p.external_load[base + 1]};
      const auto shift = solve_local_displacement(m, patch, fac, free, f, cfg.smoother, cfg);
      x[base] += shift[0];
      x[base + 1] += shift[1];
    }
    if (!p.is_fixed(base + kDim)) {
      for (int k = 0; k < patch.n; ++k) pp[k] = split_energy<2>(m, patch.pts[k].eps, Order::Value).psi_plus;
      const double dv = x[base + kDim];
      const double f = has_load ? p.external_load[base + kDim] : 0.0;
      const double shift = solve_local_damage(m, patch, pp, p.obstacle[v] - dv, 1.0 - dv, f);
      x[base + kDim] = std::clamp(dv + shift, p.obstacle[v], 1.0);
    }
  }
}

}  // namespace fracmg
