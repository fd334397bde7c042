#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "fracmg/fem/assembly.hpp"
#include "fracmg/sparse/block_matrix.hpp"

namespace fracmg {

/// Fixed SPD matrix defining the energy norm of the termination criterion:
/// undamaged elasticity on u, g_c c_gamma ((w(1)/c_l) l^2 stiffness + mass) on d.
inline GridMatrix energy_norm_matrix(const StructuredGrid& g, const MaterialModel& m) {
  GridMatrix E = GridMatrix::structured(g);
  const QuadratureData& q = g.quad;
  const MandelMatrix<2> C = undamaged_hessian<2>(m);
  const double s = m.g_c * m.c_gamma();
  const double lap = 1.0 / m.c_l() * m.l * m.l;
  for (int c = 0; c < g.num_cells(); ++c) {
    const auto vert = g.cell_vertices(c);
    for (int al = 0; al < QuadratureData::kPoints; ++al) {
      const double w = q.weight[al];
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
          const SmallMatrix<2> uu = detail::btdb(C, q.grad[al][a][0], q.grad[al][a][1], q.grad[al][b][0], q.grad[al][b][1]);
          auto& blk = E.block(vert[a], vert[b]);
          for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) blk(i, j) += w * uu(i, j);
          const double gg = q.grad[al][a][0] * q.grad[al][b][0] + q.grad[al][a][1] * q.grad[al][b][1];
          blk(2, 2) += w * s * (lap * gg + q.value[al][a] * q.value[al][b]);
        }
      }
    }
  }
  return E;
}

inline double energy_norm(const GridMatrix& E, const std::vector<double>& x) {
  return std::sqrt(std::max(0.0, E.quadratic_form(x)));
}

}  // namespace fracmg
