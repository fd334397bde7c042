#pragma once

#include <cmath>

#include "fracmg/fem/boundary.hpp"
#include "fracmg/fem/grid.hpp"
#include "fracmg/util/errors.hpp"

namespace fracmg {

struct NotchMesh {
  GridHierarchy hierarchy;
  BoundaryConditions bc;  // on the finest level
};

/// Upper half of the notched square [0,L] x [0,L/2]. The pre-crack is the
/// traction-free segment y = 0, x < L/2; the rest of the bottom edge lies on
/// the symmetry line. Top edge: u_y = load. The vertex at (L/2, 0) is fixed in
/// both directions.
inline NotchMesh build_single_notch_mesh(double L, int refine_steps, int coarse_nx = 32, int coarse_ny = 16) {
  if (refine_steps < 0) throw ConfigError("build_single_notch_mesh: refine_steps must be >= 0");
  if (!(L > 0.0)) throw ConfigError("build_single_notch_mesh: L must be positive");
  const double fine_vertices =
      (std::ldexp(double(coarse_nx), refine_steps) + 1.0) * (std::ldexp(double(coarse_ny), refine_steps) + 1.0);
  if (refine_steps > 20 || kBlock * fine_vertices > 1e7)
    throw ResourceError("build_single_notch_mesh: refinement exceeds 1e7 dofs");

  NotchMesh mesh;
  mesh.hierarchy = GridHierarchy(StructuredGrid(coarse_nx, coarse_ny, L, 0.5 * L), refine_steps);
  const StructuredGrid& g = mesh.hierarchy.finest();
  BoundaryConditions bc(g.num_dofs());
  for (int i = 0; i <= g.nx; ++i) {
    const int top = g.vertex(i, g.ny);
    bc.fix(kBlock * top + 1, 1.0);
    bc.reaction_dofs.push_back(kBlock * top + 1);
    // Symmetry line right of the notch tip (the tip itself is fixed below).
    if (2 * i > g.nx) bc.fix(kBlock * g.vertex(i, 0) + 1);
  }
  const int tip = g.vertex((g.nx + 1) / 2, 0);  // nearest vertex to (L/2, 0)
  bc.fix(kBlock * tip + 0);
  bc.fix(kBlock * tip + 1);
  mesh.bc = std::move(bc);
  return mesh;
}

}  // namespace fracmg
