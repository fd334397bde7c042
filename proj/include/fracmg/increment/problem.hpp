#pragma once

#include <memory>
#include <stdexcept>
#include <vector>

#include "fracmg/fem/boundary.hpp"
#include "fracmg/fem/grid.hpp"
#include "fracmg/material/material_model.hpp"

namespace fracmg {

/// Nodal coefficients, vertex-major: (ux, uy, d) per vertex.
struct State {
  std::vector<double> x;

  State() = default;
  explicit State(int num_vertices) : x(static_cast<std::size_t>(num_vertices) * kBlock, 0.0) {}

  int num_vertices() const { return static_cast<int>(x.size()) / kBlock; }
  int size() const { return static_cast<int>(x.size()); }
  double& u(int v, int c) { return x[kBlock * v + c]; }
  double u(int v, int c) const { return x[kBlock * v + c]; }
  double& d(int v) { return x[kBlock * v + kDim]; }
  double d(int v) const { return x[kBlock * v + kDim]; }

  std::vector<double> damage() const {
    std::vector<double> out(num_vertices());
    for (int v = 0; v < num_vertices(); ++v) out[v] = d(v);
    return out;
  }
};

inline bool is_damage_dof(int dof) { return dof % kBlock == kDim; }

/// One load step: minimize J0 + indicator of {d_n <= d <= 1} subject to the
/// Dirichlet data at `load`.
struct IncrementProblem {
  StructuredGrid grid;
  MaterialModel model;
  std::shared_ptr<const BoundaryConditions> bc;
  double load = 0.0;
  std::vector<double> obstacle;       // d_n per vertex
  std::vector<double> external_load;  // per scalar dof; empty means zero

  IncrementProblem() = default;
  IncrementProblem(const StructuredGrid& g, const MaterialModel& m, std::shared_ptr<const BoundaryConditions> b,
                   double load_, std::vector<double> d_n = {})
      : grid(g), model(m), bc(std::move(b)), load(load_), obstacle(std::move(d_n)) {
    if (obstacle.empty()) obstacle.assign(grid.num_vertices(), 0.0);
    if (static_cast<int>(obstacle.size()) != grid.num_vertices() || bc->size() != grid.num_dofs())
      throw std::invalid_argument("IncrementProblem: size mismatch");
    for (double o : obstacle)
      if (!(o >= 0.0 && o <= 1.0)) throw std::invalid_argument("IncrementProblem: obstacle outside [0,1]");
  }

  int num_vertices() const { return grid.num_vertices(); }
  int num_dofs() const { return grid.num_dofs(); }
  bool is_fixed(int dof) const { return bc->is_fixed(dof); }
  double prescribed(int dof) const { return bc->prescribed(dof, load); }
  double lower(int v) const { return obstacle[v]; }
};

}  // namespace fracmg
