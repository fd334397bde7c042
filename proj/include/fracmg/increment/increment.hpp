#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "fracmg/fem/assembly.hpp"
#include "fracmg/increment/problem.hpp"

namespace fracmg {

inline constexpr double kInfiniteEnergy = std::numeric_limits<double>::infinity();

/// Exact feasibility: obstacle bounds and Dirichlet values, no tolerance.
inline bool is_feasible(const IncrementProblem& p, const std::vector<double>& x) {
  for (int v = 0; v < p.num_vertices(); ++v) {
    const double d = x[kBlock * v + kDim];
    if (!(d >= p.obstacle[v] && d <= 1.0)) return false;
  }
  for (int i = 0; i < p.num_dofs(); ++i)
    if (p.is_fixed(i) && x[i] != p.prescribed(i)) return false;
  return true;
}

/// J = J0 + indicator; +inf when infeasible.
inline double energy(const IncrementProblem& p, const State& s) {
  if (!is_feasible(p, s.x)) return kInfiniteEnergy;
  return smooth_energy(p, s.x);
}

/// Writes the prescribed Dirichlet values into `s`.
inline void apply_dirichlet(const IncrementProblem& p, State& s) {
  for (int i = 0; i < p.num_dofs(); ++i)
    if (p.is_fixed(i)) s.x[i] = p.prescribed(i);
}

inline void project_feasible_inplace(const IncrementProblem& p, std::vector<double>& x) {
  for (int v = 0; v < p.num_vertices(); ++v) {
    double& d = x[kBlock * v + kDim];
    d = std::clamp(d, p.obstacle[v], 1.0);
  }
}

inline State project_feasible(const IncrementProblem& p, State s) {
  project_feasible_inplace(p, s.x);
  return s;
}

/// Norm of the box-projected gradient given the gradient of J0.
inline double stationarity_from_gradient(const IncrementProblem& p, const State& s,
                                         const std::vector<double>& grad) {
  double sum = 0.0;
  for (int i = 0; i < p.num_dofs(); ++i) {
    if (p.is_fixed(i)) continue;
    double r = grad[i];
    if (is_damage_dof(i)) {
      const int v = i / kBlock;
      const double d = s.x[i];
      // Components pointing out of the box do not count.
      if (d <= p.obstacle[v]) r = std::min(r, 0.0);
      if (d >= 1.0) r = std::max(r, 0.0);
    }
    sum += r * r;
  }
  return std::sqrt(sum);
}

inline double stationarity_measure(const IncrementProblem& p, const State& s) {
  return stationarity_from_gradient(p, s, assemble_gradient(p, s));
}

/// Sum of the residuals at the top-edge reaction dofs (kN per unit thickness).
inline double reaction_force(const IncrementProblem& p, const State& s) {
  const auto r = assemble_gradient(p, s);
  double f = 0.0;
  for (int dof : p.bc->reaction_dofs) f += r[dof];
  return f;
}

}  // namespace fracmg
