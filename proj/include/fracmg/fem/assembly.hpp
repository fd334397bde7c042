#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "fracmg/increment/problem.hpp"
#include "fracmg/material/crack_density.hpp"
#include "fracmg/material/density.hpp"
#include "fracmg/sparse/block_matrix.hpp"

namespace fracmg {

/// Quadrature-point values of the operator L: strain, damage, damage gradient.
struct QpValues {
  SymTensor<2> eps;
  double d = 0.0;
  std::array<double, 2> grad_d{};
};

/// How the degradation function treats quadrature damage values outside [0,1].
enum class DamageRange { Clamp, Extrapolate };

namespace detail {

struct CellDofs {
  std::array<int, 4> vert;
  std::array<double, 4 * kBlock> x;
};

inline CellDofs gather(const StructuredGrid& g, const std::vector<double>& x, int cell) {
  CellDofs c;
  c.vert = g.cell_vertices(cell);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < kBlock; ++b) c.x[kBlock * a + b] = x[kBlock * c.vert[a] + b];
  return c;
}

inline QpValues eval_qp(const QuadratureData& q, const std::array<double, 4 * kBlock>& xe, int alpha) {
  QpValues r;
  double e00 = 0, e01 = 0, e11 = 0;
  for (int a = 0; a < 4; ++a) {
    const double gx = q.grad[alpha][a][0], gy = q.grad[alpha][a][1];
    const double ux = xe[kBlock * a], uy = xe[kBlock * a + 1], d = xe[kBlock * a + 2];
    e00 += gx * ux;
    e11 += gy * uy;
    e01 += 0.5 * (gy * ux + gx * uy);
    r.d += q.value[alpha][a] * d;
    r.grad_d[0] += gx * d;
    r.grad_d[1] += gy * d;
  }
  r.eps(0, 0) = e00;
  r.eps(0, 1) = e01;
  r.eps(1, 1) = e11;
  return r;
}

inline DensityEval<2> density_at(const MaterialModel& model, const SymTensor<2>& eps, double d, DamageRange range,
                                 Order order) {
  if (range == DamageRange::Extrapolate) return psi_eval_extrapolated<2>(model, eps, d, order);
  return psi_eval<2>(model, eps, std::clamp(d, 0.0, 1.0), order);
}

}  // namespace detail

/// Strain, damage and damage gradient at quadrature point `alpha` of `cell`.
inline QpValues strain_at_qp(const StructuredGrid& g, const State& s, int cell, int alpha) {
  return detail::eval_qp(g.quad, detail::gather(g, s.x, cell).x, alpha);
}

inline double external_work(const IncrementProblem& p, const std::vector<double>& x) {
  double w = 0.0;
  if (!p.external_load.empty())
    for (std::size_t i = 0; i < x.size(); ++i) w += p.external_load[i] * x[i];
  return w;
}

/// Smooth part J0 of the increment functional (no feasibility check).
inline double smooth_energy(const IncrementProblem& p, const std::vector<double>& x,
                            DamageRange range = DamageRange::Clamp) {
  const StructuredGrid& g = p.grid;
  const QuadratureData& q = g.quad;
  const double gc = p.model.g_c;
  double e = 0.0;
  for (int c = 0; c < g.num_cells(); ++c) {
    const auto cd = detail::gather(g, x, c);
    for (int al = 0; al < QuadratureData::kPoints; ++al) {
      const QpValues v = detail::eval_qp(q, cd.x, al);
      const auto dens = detail::density_at(p.model, v.eps, v.d, range, Order::Value);
      const auto gam = crack_density_unchecked<2>(p.model, v.d, v.grad_d);
      e += q.weight[al] * (dens.value + gc * gam.gamma);
    }
  }
  return e - external_work(p, x);
}

/// Gradient of J0 with respect to all scalar dofs (constrained ones included).
inline std::vector<double> assemble_gradient(const IncrementProblem& p, const State& s,
                                             DamageRange range = DamageRange::Clamp) {
  const StructuredGrid& g = p.grid;
  const QuadratureData& q = g.quad;
  const double gc = p.model.g_c;
  std::vector<double> r(s.x.size(), 0.0);
  for (int c = 0; c < g.num_cells(); ++c) {
    const auto cd = detail::gather(g, s.x, c);
    for (int al = 0; al < QuadratureData::kPoints; ++al) {
      const QpValues v = detail::eval_qp(q, cd.x, al);
      const auto dens = detail::density_at(p.model, v.eps, v.d, range, Order::Gradient);
      const auto gam = crack_density_unchecked<2>(p.model, v.d, v.grad_d);
      const double w = q.weight[al];
      const auto& sg = dens.stress;
      const double dscal = dens.d_deriv + gc * gam.dgamma;
      for (int a = 0; a < 4; ++a) {
        const double gx = q.grad[al][a][0], gy = q.grad[al][a][1];
        double* ra = &r[kBlock * cd.vert[a]];
        ra[0] += w * (gx * sg(0, 0) + gy * sg(0, 1));
        ra[1] += w * (gx * sg(0, 1) + gy * sg(1, 1));
        ra[2] += w * (dscal * q.value[al][a] + gc * (gam.dgrad[0] * gx + gam.dgrad[1] * gy));
      }
    }
  }
  if (!p.external_load.empty())
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= p.external_load[i];
  return r;
}

namespace detail {

/// Mandel strain-displacement matrix of one vertex: eps_mandel = B (ux, uy).
inline SmallMatrix<3, 2> b_matrix(double gx, double gy) {
  constexpr double r = 0.70710678118654752440;
  SmallMatrix<3, 2> b;
  b(0, 0) = gx;
  b(1, 0) = r * gy;
  b(1, 1) = r * gx;
  b(2, 1) = gy;
  return b;
}

/// B_a^T H B_b for the Mandel strain-displacement matrices of two vertices.
inline SmallMatrix<2> btdb(const MandelMatrix<2>& H, double gax, double gay, double gbx, double gby) {
  constexpr double r = 0.70710678118654752440;
  // Columns of H B_b.
  const double c00 = H(0, 0) * gbx + H(0, 1) * r * gby, c01 = H(0, 1) * r * gbx + H(0, 2) * gby;
  const double c10 = H(1, 0) * gbx + H(1, 1) * r * gby, c11 = H(1, 1) * r * gbx + H(1, 2) * gby;
  const double c20 = H(2, 0) * gbx + H(2, 1) * r * gby, c21 = H(2, 1) * r * gbx + H(2, 2) * gby;
  SmallMatrix<2> m;
  m(0, 0) = gax * c00 + r * gay * c10;
  m(0, 1) = gax * c01 + r * gay * c11;
  m(1, 0) = r * gax * c10 + gay * c20;
  m(1, 1) = r * gax * c11 + gay * c21;
  return m;
}

}  // namespace detail

/// Generalized Hessian of J0 on the Q1 vertex stencil.
inline void assemble_gen_hessian(const IncrementProblem& p, const State& s, GridMatrix& A,
                                 DamageRange range = DamageRange::Clamp) {
  const StructuredGrid& g = p.grid;
  const QuadratureData& q = g.quad;
  const double gc = p.model.g_c;
  if (A.rows() != g.num_vertices()) A = GridMatrix::structured(g);
  A.set_zero();

  for (int c = 0; c < g.num_cells(); ++c) {
    const auto cd = detail::gather(g, s.x, c);
    SmallMatrix<4 * kBlock> ke;
    for (int al = 0; al < QuadratureData::kPoints; ++al) {
      const QpValues v = detail::eval_qp(q, cd.x, al);
      const auto dens = detail::density_at(p.model, v.eps, v.d, range, Order::Hessian);
      const auto gam = crack_density_unchecked<2>(p.model, v.d, v.grad_d);
      const double w = q.weight[al];
      const auto& mx = dens.mixed;
      const double dd_mass = dens.d_second + gc * gam.d2gamma;
      const double lapc = gc * gam.grad_coeff;
      for (int a = 0; a < 4; ++a) {
        const double ta = q.value[al][a];
        const double gax = q.grad[al][a][0], gay = q.grad[al][a][1];
        // B_a^T mixed: coupling of u_a with d.
        const double bm0 = gax * mx(0, 0) + gay * mx(0, 1);
        const double bm1 = gax * mx(0, 1) + gay * mx(1, 1);
        for (int b = 0; b < 4; ++b) {
          const double tb = q.value[al][b];
          const double gbx = q.grad[al][b][0], gby = q.grad[al][b][1];
          const SmallMatrix<2> uu = detail::btdb(dens.eps_hessian, gax, gay, gbx, gby);
          ke(kBlock * a, kBlock * b) += w * uu(0, 0);
          ke(kBlock * a, kBlock * b + 1) += w * uu(0, 1);
          ke(kBlock * a + 1, kBlock * b) += w * uu(1, 0);
          ke(kBlock * a + 1, kBlock * b + 1) += w * uu(1, 1);
          ke(kBlock * a, kBlock * b + 2) += w * bm0 * tb;
          ke(kBlock * a + 1, kBlock * b + 2) += w * bm1 * tb;
          ke(kBlock * b + 2, kBlock * a) += w * bm0 * tb;
          ke(kBlock * b + 2, kBlock * a + 1) += w * bm1 * tb;
          ke(kBlock * a + 2, kBlock * b + 2) += w * (dd_mass * ta * tb + lapc * (gax * gbx + gay * gby));
        }
      }
    }
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        auto& blk = A.block(cd.vert[a], cd.vert[b]);
        for (int i = 0; i < kBlock; ++i)
          for (int j = 0; j < kBlock; ++j) blk(i, j) += ke(kBlock * a + i, kBlock * b + j);
      }
  }
}

inline GridMatrix assemble_gen_hessian(const IncrementProblem& p, const State& s,
                                       DamageRange range = DamageRange::Clamp) {
  GridMatrix A;
  assemble_gen_hessian(p, s, A, range);
  return A;
}

/// psi_0^+ at every quadrature point, indexed cell * 4 + alpha.
inline std::vector<double> tensile_energy_at_qps(const IncrementProblem& p, const std::vector<double>& x) {
  const StructuredGrid& g = p.grid;
  std::vector<double> out(static_cast<std::size_t>(g.num_cells()) * QuadratureData::kPoints);
  for (int c = 0; c < g.num_cells(); ++c) {
    const auto cd = detail::gather(g, x, c);
    for (int al = 0; al < QuadratureData::kPoints; ++al) {
      const QpValues v = detail::eval_qp(g.quad, cd.x, al);
      out[QuadratureData::kPoints * c + al] = split_energy<2>(p.model, v.eps, Order::Value).psi_plus;
    }
  }
  return out;
}

}  // namespace fracmg
