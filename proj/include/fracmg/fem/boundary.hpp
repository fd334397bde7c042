#pragma once

#include <cstdint>
#include <vector>

#include "fracmg/fem/grid.hpp"

namespace fracmg {

/// Per scalar dof Dirichlet flags. A constrained dof takes the value
/// `unit_value[dof] * load`, where `load` is the prescribed displacement of
/// the current load step.
struct BoundaryConditions {
  std::vector<std::uint8_t> fixed;
  std::vector<double> unit_value;
  std::vector<int> reaction_dofs;  // constrained dofs whose residual is the measured force

  BoundaryConditions() = default;
  explicit BoundaryConditions(int num_dofs) : fixed(num_dofs, 0), unit_value(num_dofs, 0.0) {}

  int size() const { return static_cast<int>(fixed.size()); }
  bool is_fixed(int dof) const { return fixed[dof] != 0; }
  double prescribed(int dof, double load) const { return unit_value[dof] * load; }

  void fix(int dof, double unit = 0.0) {
    fixed[dof] = 1;
    unit_value[dof] = unit;
  }

  int count_fixed() const {
    int n = 0;
    for (auto f : fixed) n += f != 0;
    return n;
  }
};

}  // namespace fracmg
